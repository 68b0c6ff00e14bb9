#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semid/equations.hpp"
#include "semid/flow.hpp"

namespace semid {

struct SolveOptions {
  int zero_trials = 12;       // sampled models per randomized zero test
  uint64_t seed = 0x5eedULL;  // base seed for all randomized decisions
};

// One equation of the working system: lhs = sum_i coeff_i * alpha_i.
struct ActiveEquation {
  int name = 0;  // the V_k the equation is named after
  SymExpr lhs;
  std::map<int, SymExpr> terms;  // unknown index -> coefficient
};

struct SolveState {
  std::vector<ActiveEquation> active;
  std::map<int, SymExpr> solved;   // alpha index -> closed form
  std::vector<SymExpr> constraints;  // expressions that must vanish on Sigma
  std::vector<std::string> warnings;
};

// All minimal self-contained subsets (equation count equal to unknown count,
// no proper subset with that property) of the active equations, as index
// lists into `state.active`, ordered so a subset comes before any subset
// whose equations mention its unknowns. Equations without unknowns do not
// participate. Exhaustive over the subsets for systems up to 24 equations;
// larger systems fall back to maximum matching plus strongly connected
// component blocks, which finds every subset any solve order could use.
std::vector<std::vector<int>> decompose_self_contained(const SolveState& state);

// Solves one self-contained block by elimination over expressions, records
// the solutions, substitutes them into every remaining equation, and removes
// the block. Pivots are screened numerically on sampled models; a block whose
// coefficient determinant keeps vanishing throws DegenerateBlock and leaves
// the state untouched.
void solve_block(SolveState& state, const std::vector<int>& block,
                 const CausalDiagram& d, const SolveOptions& opts = {});

// The identify / solve / substitute loop over the accessory-set equations,
// followed by constraint extraction from the left-over non-parent equations.
SolveState solve_system(const CausalDiagram& d, int j, const AccessorySet& acc,
                        const SolveOptions& opts = {});

enum class CoeffStatus { Identified, UndecidedByCriterion };

struct CoefficientResult {
  int source = 0;  // k of c_jk
  CoeffStatus status = CoeffStatus::UndecidedByCriterion;
  std::optional<SymExpr> formula;
};

struct IdentificationResult {
  int target = 0;
  std::vector<CoefficientResult> coefficients;  // one per parent, ascending
  std::map<int, SymExpr> alpha_solutions;
  std::vector<SymExpr> constraints;
  AccessorySet accessory_set;
  std::vector<std::string> warnings;
};

IdentificationResult identify(const CausalDiagram& d, int j,
                              const SolveOptions& opts = {});

// One result per target that has at least one parent.
std::vector<IdentificationResult> identify_all(const CausalDiagram& d,
                                               const SolveOptions& opts = {});

}  // namespace semid
