#include "semid/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "semid/errors.hpp"
#include "semid/oracle.hpp"

namespace semid {

namespace {

constexpr int kExhaustiveLimit = 24;

int popcount64(uint64_t x) { return __builtin_popcountll(x); }

struct Incidence {
  std::vector<int> eq_index;          // positions in state.active that carry unknowns
  std::vector<uint64_t> masks;        // unknown bitmask per participating equation
  std::vector<int> unknown_ids;       // bit position -> alpha index
};

Incidence build_incidence(const SolveState& state) {
  Incidence inc;
  std::set<int> unknowns;
  for (const ActiveEquation& eq : state.active)
    for (const auto& [u, coeff] : eq.terms) {
      (void)coeff;
      unknowns.insert(u);
    }
  inc.unknown_ids.assign(unknowns.begin(), unknowns.end());
  if (inc.unknown_ids.size() > 64)
    throw SemError(ErrorCode::InvalidExpression,
                   "more than 64 unknowns in one system");
  auto bit_of = [&](int u) {
    return static_cast<int>(std::lower_bound(inc.unknown_ids.begin(),
                                             inc.unknown_ids.end(), u) -
                            inc.unknown_ids.begin());
  };
  for (int i = 0; i < static_cast<int>(state.active.size()); ++i) {
    const ActiveEquation& eq = state.active[i];
    if (eq.terms.empty()) continue;
    uint64_t mask = 0;
    for (const auto& [u, coeff] : eq.terms) {
      (void)coeff;
      mask |= uint64_t{1} << bit_of(u);
    }
    inc.eq_index.push_back(i);
    inc.masks.push_back(mask);
  }
  return inc;
}

std::vector<uint64_t> minimal_subsets_exhaustive(const std::vector<uint64_t>& masks) {
  const int m = static_cast<int>(masks.size());
  std::vector<uint64_t> minimal;
  for (int size = 1; size <= m; ++size) {
    // Gosper's hack over equation subsets of the given size.
    uint64_t subset = (uint64_t{1} << size) - 1;
    const uint64_t limit = uint64_t{1} << m;
    while (subset < limit) {
      bool dominated = false;
      for (uint64_t seen : minimal)
        if ((seen & subset) == seen) {
          dominated = true;
          break;
        }
      if (!dominated) {
        uint64_t unknowns = 0;
        for (int i = 0; i < m; ++i)
          if (subset & (uint64_t{1} << i)) unknowns |= masks[i];
        if (popcount64(unknowns) == size) minimal.push_back(subset);
      }
      const uint64_t c = subset & -subset;
      const uint64_t r = subset + c;
      subset = (((r ^ subset) >> 2) / c) | r;
    }
  }
  return minimal;
}

// Fallback for oversized systems: maximum matching, then the strongly
// connected blocks of the matched digraph that are closed under their own
// unknowns. Exact on systems whose self-contained subsets are disjoint.
std::vector<uint64_t> minimal_subsets_matched(const std::vector<uint64_t>& masks) {
  const int m = static_cast<int>(masks.size());
  std::vector<int> match_of_unknown(64, -1), match_of_eq(m, -1);
  std::vector<bool> visited;
  std::function<bool(int)> augment = [&](int e) -> bool {
    for (int u = 0; u < 64; ++u) {
      if (!(masks[e] & (uint64_t{1} << u)) || visited[u]) continue;
      visited[u] = true;
      if (match_of_unknown[u] < 0 || augment(match_of_unknown[u])) {
        match_of_unknown[u] = e;
        match_of_eq[e] = u;
        return true;
      }
    }
    return false;
  };
  for (int e = 0; e < m; ++e) {
    visited.assign(64, false);
    augment(e);
  }
  // Digraph on matched equations: e -> f when e uses f's matched unknown.
  std::vector<std::vector<int>> next(m);
  for (int e = 0; e < m; ++e) {
    if (match_of_eq[e] < 0) continue;
    for (int f = 0; f < m; ++f)
      if (f != e && match_of_eq[f] >= 0 && (masks[e] >> match_of_eq[f]) & 1)
        next[e].push_back(f);
  }
  // Kosaraju.
  std::vector<int> order;
  std::vector<bool> seen(m, false);
  std::function<void(int)> dfs1 = [&](int v) {
    seen[v] = true;
    for (int w : next[v])
      if (!seen[w]) dfs1(w);
    order.push_back(v);
  };
  for (int v = 0; v < m; ++v)
    if (match_of_eq[v] >= 0 && !seen[v]) dfs1(v);
  std::vector<std::vector<int>> prev(m);
  for (int v = 0; v < m; ++v)
    for (int w : next[v]) prev[w].push_back(v);
  std::vector<int> comp(m, -1);
  int comps = 0;
  for (int i = m - 1; i >= 0; --i) {
    const int root = order[i];
    if (comp[root] >= 0) continue;
    std::vector<int> stack{root};
    comp[root] = comps;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : prev[v])
        if (comp[w] < 0 && match_of_eq[w] >= 0) {
          comp[w] = comps;
          stack.push_back(w);
        }
    }
    ++comps;
  }
  std::vector<uint64_t> subset_of_comp(comps, 0), used_unknowns(comps, 0),
      matched_unknowns(comps, 0);
  for (int e = 0; e < m; ++e) {
    if (match_of_eq[e] < 0) continue;
    subset_of_comp[comp[e]] |= uint64_t{1} << e;
    used_unknowns[comp[e]] |= masks[e];
    matched_unknowns[comp[e]] |= uint64_t{1} << match_of_eq[e];
  }
  std::vector<uint64_t> minimal;
  for (int c = 0; c < comps; ++c)
    if (used_unknowns[c] == matched_unknowns[c]) minimal.push_back(subset_of_comp[c]);
  return minimal;
}

}  // namespace

std::vector<std::vector<int>> decompose_self_contained(const SolveState& state) {
  const Incidence inc = build_incidence(state);
  const int m = static_cast<int>(inc.masks.size());
  if (m == 0) return {};
  std::vector<uint64_t> subsets = m <= kExhaustiveLimit
                                      ? minimal_subsets_exhaustive(inc.masks)
                                      : minimal_subsets_matched(inc.masks);
  // Dependency order: a subset comes before subsets whose equations mention
  // any of its unknowns; ties stay in discovery (size, low-index) order.
  const int s = static_cast<int>(subsets.size());
  std::vector<uint64_t> unknowns_of(s, 0);
  for (int i = 0; i < s; ++i)
    for (int e = 0; e < m; ++e)
      if (subsets[i] & (uint64_t{1} << e)) unknowns_of[i] |= inc.masks[e];
  std::vector<int> order;
  std::vector<bool> placed(s, false);
  while (static_cast<int>(order.size()) < s) {
    int pick = -1;
    for (int i = 0; i < s && pick < 0; ++i) {
      if (placed[i]) continue;
      bool fed = false;
      for (int l = 0; l < s && !fed; ++l) {
        if (l == i || placed[l]) continue;
        // l feeds i when l's unknowns appear in i's equations.
        if ((unknowns_of[l] & unknowns_of[i]) != 0 &&
            (subsets[l] & subsets[i]) == 0)
          fed = true;
      }
      if (!fed) pick = i;
    }
    if (pick < 0) {  // mutual feeding; break the tie deterministically
      for (int i = 0; i < s; ++i)
        if (!placed[i]) {
          pick = i;
          break;
        }
    }
    placed[pick] = true;
    order.push_back(pick);
  }
  std::vector<std::vector<int>> out;
  out.reserve(s);
  for (int idx : order) {
    std::vector<int> block;
    for (int e = 0; e < m; ++e)
      if (subsets[idx] & (uint64_t{1} << e)) block.push_back(inc.eq_index[e]);
    out.push_back(std::move(block));
  }
  return out;
}

namespace {

void substitute_solution(SolveState& state, int unknown, const SymExpr& value) {
  for (ActiveEquation& eq : state.active) {
    auto it = eq.terms.find(unknown);
    if (it == eq.terms.end()) continue;
    eq.lhs = SymExpr::sub(eq.lhs, SymExpr::mul(it->second, value));
    eq.terms.erase(it);
  }
}

}  // namespace

void solve_block(SolveState& state, const std::vector<int>& block,
                 const CausalDiagram& d, const SolveOptions& opts) {
  const int m = static_cast<int>(block.size());
  std::set<int> unknown_set;
  for (int idx : block)
    for (const auto& [u, coeff] : state.active[idx].terms) {
      (void)coeff;
      unknown_set.insert(u);
    }
  std::vector<int> unknowns(unknown_set.begin(), unknown_set.end());
  if (static_cast<int>(unknowns.size()) != m)
    throw SemError(ErrorCode::DegenerateBlock,
                   "block is not self-contained");

  // Symbolic system A x = b.
  std::vector<std::vector<SymExpr>> a(m, std::vector<SymExpr>(m, SymExpr::constant(0.0)));
  std::vector<SymExpr> b;
  for (int r = 0; r < m; ++r) {
    const ActiveEquation& eq = state.active[block[r]];
    b.push_back(eq.lhs);
    for (const auto& [u, coeff] : eq.terms) {
      const int c = static_cast<int>(std::lower_bound(unknowns.begin(), unknowns.end(), u) -
                                     unknowns.begin());
      a[r][c] = coeff;
    }
  }

  // Numeric copies on sampled models.
  const int trials = std::max(2, opts.zero_trials);
  std::vector<Matrix> num(trials, Matrix(m, m));
  std::vector<bool> trial_ok(trials, true);
  int usable = 0;
  for (int t = 0; t < trials; ++t) {
    const Parameterization p = random_parameterization(d, Rng::mix(opts.seed, t));
    const CovarianceMatrix sigma = implied_covariance(p);
    try {
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
          num[t](r, c) = a[r][c].is_literal_zero()
                             ? 0.0
                             : evaluate_scaled(a[r][c], sigma.values).value;
      ++usable;
    } catch (const SemError&) {
      trial_ok[t] = false;
    }
  }
  if (usable == 0)
    throw SemError(ErrorCode::DegenerateBlock, "block coefficients never evaluate");
  int vanishing = 0;
  for (int t = 0; t < trials; ++t) {
    if (!trial_ok[t]) {
      ++vanishing;
      continue;
    }
    double scale = 0.0;
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) scale = std::max(scale, std::abs(num[t](r, c)));
    if (std::abs(determinant(num[t])) < 1e-9 * std::pow(1.0 + scale, m)) ++vanishing;
  }
  if (2 * vanishing >= trials)
    throw SemError(ErrorCode::DegenerateBlock,
                   "block determinant vanishes on sampled models");

  // Elimination; pivot = entry whose smallest magnitude across trials is the
  // largest, so it is safely nonzero on every sampled model.
  std::vector<int> pivot_row_of_col(m, -1);
  std::vector<bool> row_used(m, false);
  for (int col = 0; col < m; ++col) {
    int best_row = -1;
    double best_score = 0.0;
    for (int r = 0; r < m; ++r) {
      if (row_used[r] || a[r][col].is_literal_zero()) continue;
      double score = 1e300;
      for (int t = 0; t < trials; ++t)
        if (trial_ok[t]) score = std::min(score, std::abs(num[t](r, col)));
      if (score > best_score) {
        best_score = score;
        best_row = r;
      }
    }
    if (best_row < 0 || best_score < 1e-9)
      throw SemError(ErrorCode::DegenerateBlock, "no usable pivot for a column");
    row_used[best_row] = true;
    pivot_row_of_col[col] = best_row;
    for (int r = 0; r < m; ++r) {
      if (r == best_row || a[r][col].is_literal_zero()) continue;
      const SymExpr factor = SymExpr::div(a[r][col], a[best_row][col]);
      for (int c = 0; c < m; ++c) {
        if (a[best_row][c].is_literal_zero()) continue;
        a[r][c] = SymExpr::sub(a[r][c], SymExpr::mul(factor, a[best_row][c]));
      }
      b[r] = SymExpr::sub(b[r], SymExpr::mul(factor, b[best_row]));
      for (int t = 0; t < trials; ++t) {
        if (!trial_ok[t]) continue;
        const double f = num[t](r, col) / num[t](best_row, col);
        for (int c = 0; c < m; ++c) num[t](r, c) -= f * num[t](best_row, c);
      }
      a[r][col] = SymExpr::constant(0.0);
      for (int t = 0; t < trials; ++t)
        if (trial_ok[t]) num[t](r, col) = 0.0;
    }
  }

  // Each pivot row now carries exactly one unknown.
  std::map<int, SymExpr> solutions;
  for (int col = 0; col < m; ++col) {
    const int r = pivot_row_of_col[col];
    solutions.emplace(unknowns[col], SymExpr::div(b[r], a[r][col]));
  }

  std::vector<int> sorted_block = block;
  std::sort(sorted_block.begin(), sorted_block.end());
  for (int i = static_cast<int>(sorted_block.size()) - 1; i >= 0; --i)
    state.active.erase(state.active.begin() + sorted_block[i]);
  for (const auto& [u, value] : solutions) {
    substitute_solution(state, u, value);
    state.solved.emplace(u, value);
  }
}

SolveState solve_system(const CausalDiagram& d, int j, const AccessorySet& acc,
                        const SolveOptions& opts) {
  SolveState state;
  const EquationSystem np = build_np_system(d, j);
  const std::set<int> in_z(acc.sources.begin(), acc.sources.end());
  std::vector<ActiveEquation> leftovers;
  for (const PregEquation& eq : np.equations) {
    ActiveEquation ae{eq.name, eq.lhs, eq.alpha_terms};
    if (in_z.count(eq.name))
      state.active.push_back(std::move(ae));
    else
      leftovers.push_back(std::move(ae));
  }
  // Already-solved values substitute into everything at the end, so keep the
  // non-accessory equations aside while the loop runs.
  while (true) {
    bool progress = false;
    for (const std::vector<int>& block : decompose_self_contained(state)) {
      try {
        solve_block(state, block, d, opts);
        progress = true;
        break;  // indices shifted and unknowns moved; decompose again
      } catch (const SemError& err) {
        if (err.code() != ErrorCode::DegenerateBlock) throw;
        const std::string note = std::string("degenerate block skipped: ") + err.what();
        if (std::find(state.warnings.begin(), state.warnings.end(), note) ==
            state.warnings.end())
          state.warnings.push_back(note);
      }
    }
    if (!progress) break;
  }

  // Prefer the cleared-denominator form of a constraint (products of
  // regression coefficients) when it stays small and numerically tame;
  // deep solution substitutions make the cleared numerator blow up through
  // catastrophic cancellation, so those fall back to the raw residual.
  auto tame = [&](const SymExpr& e) {
    const int probes = std::min(4, std::max(1, opts.zero_trials));
    for (int t = 0; t < probes; ++t) {
      const Parameterization p = random_parameterization(d, Rng::mix(opts.seed ^ 0xC0, t));
      try {
        const EvalResult r = evaluate_scaled(e, implied_covariance(p).values);
        if (r.scale > 1e6 || std::abs(r.value) > 1e-8 * (1.0 + r.scale)) return false;
      } catch (const SemError&) {
        return false;
      }
    }
    return true;
  };
  auto finish_equation = [&](const ActiveEquation& eq) {
    SymExpr residual = eq.lhs;
    for (const auto& [u, coeff] : eq.terms) {
      auto it = state.solved.find(u);
      if (it == state.solved.end()) return;  // unsolved unknown: discard
      residual = SymExpr::sub(residual, SymExpr::mul(coeff, it->second));
    }
    if (residual.is_literal_zero()) return;
    const SymExpr cleared = as_ratio(residual).numerator;
    if (!cleared.is_literal_zero() && node_count(cleared) <= 100 && tame(cleared))
      state.constraints.push_back(cleared);
    else
      state.constraints.push_back(residual);
  };
  for (const ActiveEquation& eq : state.active) finish_equation(eq);
  for (const ActiveEquation& eq : leftovers) finish_equation(eq);
  state.active.clear();
  return state;
}

IdentificationResult identify(const CausalDiagram& d, int j, const SolveOptions& opts) {
  IdentificationResult result;
  result.target = j;
  const VariableClassification cls = classify(d, j);
  result.accessory_set = find_accessory_set(d, j);
  SolveState state = solve_system(d, j, result.accessory_set, opts);
  result.alpha_solutions = state.solved;
  result.constraints = std::move(state.constraints);
  result.warnings = std::move(state.warnings);
  for (int k : cls.parents) {
    CoefficientResult cr;
    cr.source = k;
    if (auto formula = coefficient_formula(d, j, k, result.alpha_solutions)) {
      cr.status = CoeffStatus::Identified;
      cr.formula = std::move(formula);
    }
    result.coefficients.push_back(std::move(cr));
  }
  return result;
}

std::vector<IdentificationResult> identify_all(const CausalDiagram& d,
                                               const SolveOptions& opts) {
  std::vector<IdentificationResult> out;
  for (int j = 1; j < d.size(); ++j) {
    bool has_parent = false;
    for (int k = 0; k < j && !has_parent; ++k)
      if (d.has_directed(k, j)) has_parent = true;
    if (has_parent) out.push_back(identify(d, j, opts));
  }
  return out;
}

}  // namespace semid
