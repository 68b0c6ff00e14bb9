#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "semid/expr.hpp"
#include "semid/graph.hpp"

namespace semid {

// One partial regression equation for target V_j, named after V_k:
//   b(j,k|S_jk) = [c_jk] + [alpha_jk] - sum_l b(l,k|S_lk) * alpha_jl
// Alpha terms drop out when the predecessor is not error-correlated with the
// target, and a summand drops out when its regression coefficient is
// structurally zero.
struct PregEquation {
  int target = 0;  // j
  int name = 0;    // k
  SymExpr lhs;     // the atom b(j,k|S_jk)
  bool lhs_structurally_zero = false;
  bool c_term = false;                 // c_jk present (k is a parent)
  std::map<int, SymExpr> alpha_terms;  // unknown index i -> coefficient of alpha_ji
};

struct EquationSystem {
  int target = 0;
  std::vector<PregEquation> equations;
  std::vector<int> unknowns;  // sorted alpha indices appearing anywhere
};

PregEquation build_equation(const CausalDiagram& d, int j, int k);

// Equations named after the non-parents of V_j, with the c term absent.
// Equations that reduce to 0 = 0 (structurally zero left side, no unknowns)
// are dropped; a structurally zero left side with live unknowns is kept as a
// literal zero.
EquationSystem build_np_system(const CausalDiagram& d, int j);

// Rewrites equation (V_k), k a parent of V_j, for the path coefficient:
//   c_jk = b(j,k|S_jk) - alpha_jk + sum_l b(l,k|S_lk) * alpha_jl.
// Alphas outside the error-correlated set are zero; the rest must appear in
// `alpha_solutions` or the coefficient is undecided by this criterion.
std::optional<SymExpr> coefficient_formula(const CausalDiagram& d, int j, int k,
                                           const std::map<int, SymExpr>& alpha_solutions);

// Randomized zero test: evaluates the expression on `trials` sampled
// covariance matrices of the diagram. True when every evaluation stays below
// 1e-9 * (1 + scale). Divisions that blow up in at least half the trials
// raise IllConditionedExpression.
bool is_probably_zero(const SymExpr& e, const CausalDiagram& d, int trials,
                      uint64_t seed = 0x5eed);

}  // namespace semid
