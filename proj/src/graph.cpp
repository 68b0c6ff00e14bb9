#include "semid/graph.hpp"

#include <algorithm>
#include <array>
#include <deque>

#include "semid/errors.hpp"

namespace semid {

namespace {

void check_index(const CausalDiagram& d, int idx, const char* what) {
  if (idx < 0 || idx >= d.size())
    throw SemError(ErrorCode::IndexOutOfRange,
                   std::string(what) + " index " + std::to_string(idx) + " out of range");
}

}  // namespace

std::vector<int> s_set(const CausalDiagram& d, int j, int k) {
  check_index(d, j, "target");
  check_index(d, k, "regressor");
  if (!(k < j))
    throw SemError(ErrorCode::IndexOutOfRange,
                   "regressor must precede the target in the causal order");
  std::vector<int> out;
  out.reserve(j - 1);
  for (int i = 0; i < j; ++i)
    if (i != k) out.push_back(i);
  return out;
}

bool alpha_nonzero(const CausalDiagram& d, int j, int k) {
  check_index(d, j, "target");
  check_index(d, k, "predecessor");
  if (!(k < j))
    throw SemError(ErrorCode::IndexOutOfRange,
                   "predecessor must precede the target in the causal order");
  if (d.has_bidirected(k, j)) return true;
  // Reachability from k to j in the bidirected subgraph where intermediate
  // nodes are restricted to indices below k.
  std::vector<bool> visited(d.size(), false);
  std::deque<int> queue{k};
  visited[k] = true;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (const auto& [a, b] : d.bidirected_edges) {
      if (a != v && b != v) continue;
      const int w = (a == v) ? b : a;
      if (w == j) return true;
      if (w < k && !visited[w]) {
        visited[w] = true;
        queue.push_back(w);
      }
    }
  }
  return false;
}

bool exists_active_path(const CausalDiagram& d, int a, int b,
                        const std::vector<int>& conditioning) {
  check_index(d, a, "endpoint");
  check_index(d, b, "endpoint");
  if (a == b)
    throw SemError(ErrorCode::IndexOutOfRange, "endpoints must be distinct");
  const int n = d.size();
  std::vector<bool> in_set(n, false);
  for (int z : conditioning) {
    check_index(d, z, "conditioning");
    in_set[z] = true;
  }
  if (in_set[a] || in_set[b])
    throw SemError(ErrorCode::EndpointInConditioningSet,
                   "path endpoints may not appear in the conditioning set");

  const std::vector<bool> anc = ancestor_closure(d, conditioning);

  // Arc list as (neighbor, arrow at this node, arrow at the neighbor).
  struct Arc {
    int to;
    bool arrow_here;
    bool arrow_there;
  };
  std::vector<std::vector<Arc>> adj(n);
  for (const auto& [tail, head] : d.directed_edges) {
    adj[tail].push_back({head, false, true});
    adj[head].push_back({tail, true, false});
  }
  for (const auto& [x, y] : d.bidirected_edges) {
    adj[x].push_back({y, true, true});
    adj[y].push_back({x, true, true});
  }

  // State: node + whether the edge we arrived on points at it.
  std::vector<std::array<bool, 2>> seen(n, {false, false});
  std::deque<std::pair<int, bool>> queue;
  for (const Arc& arc : adj[a]) {
    if (arc.to == b) return true;
    if (!seen[arc.to][arc.arrow_there]) {
      seen[arc.to][arc.arrow_there] = true;
      queue.emplace_back(arc.to, arc.arrow_there);
    }
  }
  while (!queue.empty()) {
    const auto [v, in_arrow] = queue.front();
    queue.pop_front();
    for (const Arc& arc : adj[v]) {
      const bool collider = in_arrow && arc.arrow_here;
      if (collider) {
        if (!(in_set[v] || anc[v])) continue;
      } else {
        if (in_set[v]) continue;
      }
      if (arc.to == b) return true;
      if (!seen[arc.to][arc.arrow_there]) {
        seen[arc.to][arc.arrow_there] = true;
        queue.emplace_back(arc.to, arc.arrow_there);
      }
    }
  }
  return false;
}

bool beta_structurally_nonzero(const CausalDiagram& d, int j, int k) {
  return exists_active_path(d, j, k, s_set(d, j, k));
}

VariableClassification classify(const CausalDiagram& d, int j) {
  check_index(d, j, "target");
  if (j < 1)
    throw SemError(ErrorCode::IndexOutOfRange,
                   "classification needs at least one predecessor");
  VariableClassification out;
  out.target = j;
  for (int k = 0; k < j; ++k) {
    if (d.has_directed(k, j))
      out.parents.push_back(k);
    else
      out.non_parents.push_back(k);
    if (alpha_nonzero(d, j, k)) out.error_correlated.push_back(k);
  }
  return out;
}

std::vector<bool> ancestor_closure(const CausalDiagram& d,
                                   const std::vector<int>& targets) {
  std::vector<bool> anc(d.size(), false);
  std::deque<int> queue;
  for (int t : targets) {
    if (!anc[t]) {
      anc[t] = true;
      queue.push_back(t);
    }
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (const auto& [tail, head] : d.directed_edges) {
      if (head == v && !anc[tail]) {
        anc[tail] = true;
        queue.push_back(tail);
      }
    }
  }
  return anc;
}

}  // namespace semid
