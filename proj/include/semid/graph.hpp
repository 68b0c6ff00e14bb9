#pragma once

#include <vector>

#include "semid/model.hpp"

namespace semid {

// Predecessors of a target variable V_j split by role: parents (direct edge
// into V_j), non-parents (the complement), and the predecessors whose error
// term stays correlated with V_j's after orthogonalization. The first two
// partition {V_0..V_{j-1}}; the third may overlap both.
struct VariableClassification {
  int target = 0;
  std::vector<int> parents;
  std::vector<int> non_parents;
  std::vector<int> error_correlated;
};

// Conditioning set used throughout: all predecessors of V_j except V_k.
std::vector<int> s_set(const CausalDiagram& d, int j, int k);

// True when alpha_{jk} (the coefficient of V_k's orthogonalized error in
// V_j's error) is not identically zero: a bidirected edge V_k <-> V_j, or a
// bidirected path between them whose intermediate nodes all precede V_k.
bool alpha_nonzero(const CausalDiagram& d, int j, int k);

// Exact d-connection test: is some path between a and b active given the
// conditioning set? Non-colliders must avoid the set, colliders must be in
// it or be a directed ancestor of a member. Reachability over
// (node, arrived-with-arrowhead) states; bidirected ends always carry
// arrowheads, directed ancestry only follows directed edges.
bool exists_active_path(const CausalDiagram& d, int a, int b,
                        const std::vector<int>& conditioning);

// Genericity convention: beta_{jk.S_jk} is treated as nonzero exactly when
// an active path between V_j and V_k given S_jk exists.
bool beta_structurally_nonzero(const CausalDiagram& d, int j, int k);

VariableClassification classify(const CausalDiagram& d, int j);

// Nodes with a directed path into the given set (the set itself included).
std::vector<bool> ancestor_closure(const CausalDiagram& d,
                                   const std::vector<int>& targets);

}  // namespace semid
