#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semid/model.hpp"

namespace semid {

enum class EdgeKind { Directed, Bidirected };

struct PathEdge {
  EdgeKind kind = EdgeKind::Directed;
  // For directed edges: true when the traversal runs against the arrow,
  // i.e. the diagram edge points from the later path node to the earlier one.
  bool reversed = false;
};

// A walk in the causal diagram with distinct nodes. A single node with no
// edges is the degenerate path.
struct DiagramPath {
  std::vector<int> nodes;
  std::vector<PathEdge> edges;  // edges[i] joins nodes[i] and nodes[i+1]

  bool degenerate() const { return nodes.size() == 1; }
  int source() const { return nodes.front(); }
  int end() const { return nodes.back(); }
};

struct FlowArcMeaning {
  enum class Kind { Node, DirectedEdge, BidirectedEdge, FromSource, ToSink, Split };
  Kind kind = Kind::Split;
  int a = -1, b = -1;  // diagram indices; Node/FromSource/ToSink use `a` only
};

struct FlowArc {
  int from = 0, to = 0;
  FlowArcMeaning meaning;
};

// Unit-capacity network for the accessory-set search relative to one target.
// Every variable before the target contributes a minus and a plus node, each
// split into an in/out pair so node capacity 1 is explicit. The arc list is
// built in a fixed order so downstream output is reproducible.
struct FlowNetwork {
  int target = 0;
  std::vector<std::string> variable_names;  // of the whole diagram
  int node_count = 0;
  int source = 0, sink = 1;
  std::vector<FlowArc> arcs;

  static int minus_in(int i) { return 2 + 4 * i; }
  static int minus_out(int i) { return 3 + 4 * i; }
  static int plus_in(int i) { return 4 + 4 * i; }
  static int plus_out(int i) { return 5 + 4 * i; }
};

// Sources Z (non-parents), ends X (error-correlated predecessors) and the
// connecting paths, one triple per unit of flow.
struct AccessorySet {
  int target = 0;
  std::vector<int> sources;
  std::vector<int> ends;
  std::vector<DiagramPath> paths;

  int size() const { return static_cast<int>(sources.size()); }
};

FlowNetwork build_flow_network(const CausalDiagram& d, int j);

// Maximum integral flow via shortest augmenting paths; ties are broken toward
// the lexicographically smallest node sequence, so the result is a pure
// function of the network. Returns the flow decomposed into arc-id paths
// from source to sink.
std::vector<std::vector<int>> max_flow(const FlowNetwork& net);

// Maps network paths back to diagram paths: a minus->plus arc on one
// variable is that node, across variables it is a directed edge, and a
// plus->plus arc is a bidirected edge.
std::vector<DiagramPath> interpret_paths(const FlowNetwork& net,
                                         const std::vector<std::vector<int>>& paths);

// Repairs paths that run past their endpoint in the causal order: the
// last-ordered node becomes the new end and the path is cut there. Verifies
// every accessory-set condition before returning.
AccessorySet fixup_and_assemble(const CausalDiagram& d, int j,
                                std::vector<DiagramPath> paths);

AccessorySet find_accessory_set(const CausalDiagram& d, int j);

// Full independent check of the accessory-set conditions (path shapes,
// ordering, memberships, pairwise edge-disjointness and the shared-variable
// rules). Returns a description of the first violation, or nullopt.
std::optional<std::string> accessory_set_violation(const CausalDiagram& d, int j,
                                                   const AccessorySet& acc);

// Deterministic arc list, one conceptual arc per line: "u -> v cap=1 [...]".
std::string dump_network(const FlowNetwork& net);

}  // namespace semid
