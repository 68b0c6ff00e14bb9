#include "semid/equations.hpp"

#include <algorithm>
#include <cmath>

#include "semid/errors.hpp"
#include "semid/oracle.hpp"

namespace semid {

PregEquation build_equation(const CausalDiagram& d, int j, int k) {
  if (!(0 <= k && k < j && j < d.size()))
    throw SemError(ErrorCode::IndexOutOfRange, "equation indices out of range");
  PregEquation eq;
  eq.target = j;
  eq.name = k;
  eq.lhs = SymExpr::beta(j, k, s_set(d, j, k));
  eq.lhs_structurally_zero = !beta_structurally_nonzero(d, j, k);
  eq.c_term = d.has_directed(k, j);
  if (alpha_nonzero(d, j, k)) eq.alpha_terms.emplace(k, SymExpr::constant(1.0));
  for (int l = k + 1; l < j; ++l) {
    if (!alpha_nonzero(d, j, l)) continue;
    if (!beta_structurally_nonzero(d, l, k)) continue;
    eq.alpha_terms.emplace(l, SymExpr::neg(SymExpr::beta(l, k, s_set(d, l, k))));
  }
  return eq;
}

EquationSystem build_np_system(const CausalDiagram& d, int j) {
  if (!(1 <= j && j < d.size()))
    throw SemError(ErrorCode::IndexOutOfRange, "target index out of range");
  EquationSystem sys;
  sys.target = j;
  const VariableClassification cls = classify(d, j);
  for (int k : cls.non_parents) {
    PregEquation eq = build_equation(d, j, k);
    eq.c_term = false;
    if (eq.lhs_structurally_zero) {
      if (eq.alpha_terms.empty()) continue;  // vacuous 0 = 0
      eq.lhs = SymExpr::constant(0.0);
    }
    for (const auto& [unknown, coeff] : eq.alpha_terms) {
      (void)coeff;
      sys.unknowns.push_back(unknown);
    }
    sys.equations.push_back(std::move(eq));
  }
  std::sort(sys.unknowns.begin(), sys.unknowns.end());
  sys.unknowns.erase(std::unique(sys.unknowns.begin(), sys.unknowns.end()),
                     sys.unknowns.end());
  return sys;
}

std::optional<SymExpr> coefficient_formula(const CausalDiagram& d, int j, int k,
                                           const std::map<int, SymExpr>& alpha_solutions) {
  if (!(0 <= k && k < j && j < d.size()))
    throw SemError(ErrorCode::IndexOutOfRange, "coefficient indices out of range");
  if (!d.has_directed(k, j))
    throw SemError(ErrorCode::NotAParent,
                   d.name(k) + " is not a parent of " + d.name(j));
  SymExpr formula = SymExpr::beta(j, k, s_set(d, j, k));
  if (alpha_nonzero(d, j, k)) {
    auto it = alpha_solutions.find(k);
    if (it == alpha_solutions.end()) return std::nullopt;
    formula = SymExpr::sub(formula, it->second);
  }
  for (int l = k + 1; l < j; ++l) {
    if (!alpha_nonzero(d, j, l)) continue;
    if (!beta_structurally_nonzero(d, l, k)) continue;
    auto it = alpha_solutions.find(l);
    if (it == alpha_solutions.end()) return std::nullopt;
    formula = SymExpr::add(formula,
                           SymExpr::mul(SymExpr::beta(l, k, s_set(d, l, k)), it->second));
  }
  return formula;
}

bool is_probably_zero(const SymExpr& e, const CausalDiagram& d, int trials,
                      uint64_t seed) {
  if (trials < 1)
    throw SemError(ErrorCode::InvalidExpression, "zero test needs at least one trial");
  int blowups = 0;
  bool all_small = true;
  for (int t = 0; t < trials; ++t) {
    const Parameterization p = random_parameterization(d, Rng::mix(seed, t));
    const CovarianceMatrix sigma = implied_covariance(p);
    try {
      const EvalResult r = evaluate_scaled(e, sigma.values);
      if (std::abs(r.value) >= 1e-9 * (1.0 + r.scale)) all_small = false;
    } catch (const SemError& err) {
      if (err.code() != ErrorCode::DivisionByZero) throw;
      ++blowups;
    }
  }
  if (2 * blowups >= trials)
    throw SemError(ErrorCode::IllConditionedExpression,
                   "expression divides by zero on most sampled models");
  return all_small;
}

}  // namespace semid
