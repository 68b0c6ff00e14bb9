#pragma once

#include <string>
#include <utility>
#include <vector>

#include "semid/errors.hpp"
#include "semid/linalg.hpp"

namespace semid {

// Structure of a recursive linear structural equation model: variables in
// causal order (index 0..n-1), directed edges (k, j) with k < j for
// V_k -> V_j, and bidirected edges {i, j} (stored with i < j) marking
// correlated errors V_i <-> V_j. Immutable after construction; build through
// build_diagram so the invariants hold.
struct CausalDiagram {
  std::vector<std::string> variables;
  std::vector<std::pair<int, int>> directed_edges;    // sorted (tail, head)
  std::vector<std::pair<int, int>> bidirected_edges;  // sorted (lo, hi)

  int size() const { return static_cast<int>(variables.size()); }
  bool has_directed(int tail, int head) const;
  bool has_bidirected(int a, int b) const;
  int index_of(const std::string& name) const;  // throws UnknownVariable
  const std::string& name(int index) const;     // throws IndexOutOfRange

  bool operator==(const CausalDiagram& other) const = default;
};

// Path coefficients C (strictly lower triangular on the causal order) and
// error covariance Psi for a fixed diagram.
struct Parameterization {
  CausalDiagram diagram;
  Matrix coefficients;       // coefficients(j, k) = effect of V_k on V_j
  Matrix error_covariance;   // symmetric, support = bidirected edges + diagonal
};

struct CovarianceMatrix {
  std::vector<std::string> labels;
  Matrix values;

  int size() const { return static_cast<int>(labels.size()); }
};

// Validates names and edges, resolves names to order indices.
// Directed pairs must be given as (cause, effect) with the cause declared
// earlier; anything else is an OrderViolation, not a silent reversal.
CausalDiagram build_diagram(const std::vector<std::string>& names,
                            const std::vector<std::pair<std::string, std::string>>& directed,
                            const std::vector<std::pair<std::string, std::string>>& bidirected);

// Index-based variant used internally and by generators.
CausalDiagram build_diagram_indices(std::vector<std::string> names,
                                    std::vector<std::pair<int, int>> directed,
                                    std::vector<std::pair<int, int>> bidirected);

struct ValidationIssue {
  ErrorCode code;  // SupportMismatch or NotPositiveDefinite
  std::string message;
};

// Checks that the nonzero pattern of the matrices matches the diagram edge
// sets exactly and that Psi is symmetric positive definite. Returns the list
// of problems, empty when the parameterization is valid.
std::vector<ValidationIssue> validate_parameterization(const Parameterization& p);

}  // namespace semid
