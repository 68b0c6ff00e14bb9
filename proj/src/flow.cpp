#include "semid/flow.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>

#include "semid/errors.hpp"
#include "semid/graph.hpp"

namespace semid {

namespace {

constexpr int kInfinity = 1 << 29;

// Arrowhead of edge `idx` at nodes[idx] (the earlier traversal endpoint).
bool arrow_at_left(const PathEdge& e) {
  return e.kind == EdgeKind::Bidirected || e.reversed;
}

// Arrowhead of edge `idx` at nodes[idx + 1].
bool arrow_at_right(const PathEdge& e) {
  return e.kind == EdgeKind::Bidirected || !e.reversed;
}

bool collider_at(const DiagramPath& p, int position) {
  // position indexes nodes; valid only for intermediates.
  return arrow_at_right(p.edges[position - 1]) && arrow_at_left(p.edges[position]);
}

std::tuple<int, int, int> edge_key(const DiagramPath& p, int idx) {
  const int a = p.nodes[idx], b = p.nodes[idx + 1];
  const PathEdge& e = p.edges[idx];
  if (e.kind == EdgeKind::Bidirected) return {1, std::min(a, b), std::max(a, b)};
  const int tail = e.reversed ? b : a;
  const int head = e.reversed ? a : b;
  return {0, tail, head};
}

}  // namespace

FlowNetwork build_flow_network(const CausalDiagram& d, int j) {
  if (!(1 <= j && j < d.size()))
    throw SemError(ErrorCode::IndexOutOfRange, "target index out of range");
  FlowNetwork net;
  net.target = j;
  net.variable_names = d.variables;
  net.node_count = 2 + 4 * j;

  const VariableClassification cls = classify(d, j);

  // Split arcs first, then node arcs, directed-edge arcs, bidirected-edge
  // arcs (both ways), sink arcs, source arcs; each group in index order.
  for (int i = 0; i < j; ++i) {
    net.arcs.push_back({FlowNetwork::minus_in(i), FlowNetwork::minus_out(i),
                        {FlowArcMeaning::Kind::Split, i, -1}});
    net.arcs.push_back({FlowNetwork::plus_in(i), FlowNetwork::plus_out(i),
                        {FlowArcMeaning::Kind::Split, i, -1}});
  }
  for (int i = 0; i < j; ++i)
    net.arcs.push_back({FlowNetwork::minus_out(i), FlowNetwork::plus_in(i),
                        {FlowArcMeaning::Kind::Node, i, -1}});
  for (const auto& [tail, head] : d.directed_edges)
    if (tail < j && head < j)
      net.arcs.push_back({FlowNetwork::minus_out(tail), FlowNetwork::plus_in(head),
                          {FlowArcMeaning::Kind::DirectedEdge, tail, head}});
  for (const auto& [a, b] : d.bidirected_edges)
    if (a < j && b < j) {
      net.arcs.push_back({FlowNetwork::plus_out(a), FlowNetwork::plus_in(b),
                          {FlowArcMeaning::Kind::BidirectedEdge, a, b}});
      net.arcs.push_back({FlowNetwork::plus_out(b), FlowNetwork::plus_in(a),
                          {FlowArcMeaning::Kind::BidirectedEdge, b, a}});
    }
  for (int i : cls.error_correlated)
    net.arcs.push_back({FlowNetwork::plus_out(i), net.sink,
                        {FlowArcMeaning::Kind::ToSink, i, -1}});
  for (int i : cls.non_parents)
    net.arcs.push_back({net.source, FlowNetwork::minus_in(i),
                        {FlowArcMeaning::Kind::FromSource, i, -1}});
  return net;
}

std::vector<std::vector<int>> max_flow(const FlowNetwork& net) {
  const int arc_count = static_cast<int>(net.arcs.size());
  // Residual structure: entry 2*i is arc i forward, 2*i+1 its reverse.
  std::vector<int> cap(2 * arc_count);
  for (int i = 0; i < arc_count; ++i) cap[2 * i] = 1;
  auto res_from = [&](int e) { return e % 2 == 0 ? net.arcs[e / 2].from : net.arcs[e / 2].to; };
  auto res_to = [&](int e) { return e % 2 == 0 ? net.arcs[e / 2].to : net.arcs[e / 2].from; };

  std::vector<std::vector<int>> adj(net.node_count);
  for (int e = 0; e < 2 * arc_count; ++e) adj[res_from(e)].push_back(e);
  // Scan order: ascending head id, so search decisions are reproducible.
  for (auto& list : adj)
    std::sort(list.begin(), list.end(),
              [&](int x, int y) { return res_to(x) < res_to(y) || (res_to(x) == res_to(y) && x < y); });

  auto bfs = [&](int start, bool forward) {
    std::vector<int> dist(net.node_count, kInfinity);
    std::deque<int> queue{start};
    dist[start] = 0;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int e = 0; e < 2 * arc_count; ++e) {
        if (cap[e] <= 0) continue;
        const int u = forward ? res_from(e) : res_to(e);
        const int w = forward ? res_to(e) : res_from(e);
        if (u != v || dist[w] != kInfinity) continue;
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
    return dist;
  };

  while (true) {
    const std::vector<int> dist_s = bfs(net.source, true);
    if (dist_s[net.sink] == kInfinity) break;
    const std::vector<int> dist_t = bfs(net.sink, false);
    const int length = dist_s[net.sink];
    // Walk the lexicographically smallest shortest augmenting path.
    int v = net.source;
    std::vector<int> route;
    while (v != net.sink) {
      int chosen = -1;
      for (int e : adj[v]) {
        if (cap[e] <= 0) continue;
        const int w = res_to(e);
        if (dist_s[v] + 1 + dist_t[w] != length || dist_t[w] != dist_t[v] - 1) continue;
        chosen = e;
        break;
      }
      if (chosen < 0)
        throw SemError(ErrorCode::MalformedPath, "augmenting walk lost the sink");
      route.push_back(chosen);
      v = res_to(chosen);
    }
    for (int e : route) {
      cap[e] -= 1;
      cap[e ^ 1] += 1;
    }
  }

  // Decompose: unit node capacities leave at most one flow arc out of any
  // split node, so walks from the source are forced.
  std::vector<bool> used(arc_count, false);
  std::vector<std::vector<int>> paths;
  while (true) {
    int first = -1;
    for (int i = 0; i < arc_count; ++i) {
      if (net.arcs[i].from == net.source && cap[2 * i] == 0 && !used[i]) {
        if (first < 0 || net.arcs[i].to < net.arcs[first].to) first = i;
      }
    }
    if (first < 0) break;
    std::vector<int> path{first};
    used[first] = true;
    int v = net.arcs[first].to;
    int guard = 0;
    while (v != net.sink) {
      if (++guard > net.node_count)
        throw SemError(ErrorCode::MalformedPath, "flow decomposition cycled");
      int next = -1;
      for (int i = 0; i < arc_count; ++i)
        if (net.arcs[i].from == v && cap[2 * i] == 0 && !used[i]) {
          next = i;
          break;
        }
      if (next < 0)
        throw SemError(ErrorCode::MalformedPath, "flow conservation broken");
      used[next] = true;
      path.push_back(next);
      v = net.arcs[next].to;
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

std::vector<DiagramPath> interpret_paths(const FlowNetwork& net,
                                         const std::vector<std::vector<int>>& paths) {
  std::vector<DiagramPath> out;
  out.reserve(paths.size());
  for (const std::vector<int>& arc_ids : paths) {
    DiagramPath p;
    for (int id : arc_ids) {
      if (id < 0 || id >= static_cast<int>(net.arcs.size()))
        throw SemError(ErrorCode::MalformedPath, "arc id without a meaning");
      const FlowArcMeaning& m = net.arcs[id].meaning;
      switch (m.kind) {
        case FlowArcMeaning::Kind::Split:
          break;
        case FlowArcMeaning::Kind::FromSource:
          if (!p.nodes.empty())
            throw SemError(ErrorCode::MalformedPath, "source arc mid-path");
          p.nodes.push_back(m.a);
          break;
        case FlowArcMeaning::Kind::Node:
          if (p.nodes.empty() || p.nodes.back() != m.a)
            throw SemError(ErrorCode::MalformedPath, "node arc off the walk");
          break;
        case FlowArcMeaning::Kind::DirectedEdge:
          if (p.nodes.empty() || p.nodes.back() != m.a)
            throw SemError(ErrorCode::MalformedPath, "directed arc off the walk");
          p.nodes.push_back(m.b);
          p.edges.push_back({EdgeKind::Directed, false});
          break;
        case FlowArcMeaning::Kind::BidirectedEdge:
          if (p.nodes.empty() || p.nodes.back() != m.a)
            throw SemError(ErrorCode::MalformedPath, "bidirected arc off the walk");
          p.nodes.push_back(m.b);
          p.edges.push_back({EdgeKind::Bidirected, false});
          break;
        case FlowArcMeaning::Kind::ToSink:
          if (p.nodes.empty() || p.nodes.back() != m.a)
            throw SemError(ErrorCode::MalformedPath, "sink arc off the walk");
          break;
      }
    }
    if (p.nodes.empty())
      throw SemError(ErrorCode::MalformedPath, "empty network path");
    out.push_back(std::move(p));
  }
  return out;
}

AccessorySet fixup_and_assemble(const CausalDiagram& d, int j,
                                std::vector<DiagramPath> paths) {
  AccessorySet acc;
  acc.target = j;
  std::set<int> taken_ends;
  for (const DiagramPath& p : paths) taken_ends.insert(p.end());

  for (DiagramPath& p : paths) {
    int last_pos = 0;
    for (int i = 1; i < static_cast<int>(p.nodes.size()); ++i)
      if (p.nodes[i] > p.nodes[last_pos]) last_pos = i;
    if (p.nodes[last_pos] > p.end()) {
      taken_ends.erase(p.end());
      const int new_end = p.nodes[last_pos];
      if (!alpha_nonzero(d, j, new_end))
        throw SemError(ErrorCode::Def2ViolationInternal,
                       "repaired endpoint is not error-correlated with the target");
      if (!taken_ends.insert(new_end).second)
        throw SemError(ErrorCode::Def2ViolationInternal,
                       "repaired endpoint collides with another path");
      p.nodes.resize(last_pos + 1);
      p.edges.resize(last_pos);
    }
  }
  for (const DiagramPath& p : paths) {
    acc.sources.push_back(p.source());
    acc.ends.push_back(p.end());
  }
  acc.paths = std::move(paths);
  if (auto violation = accessory_set_violation(d, j, acc))
    throw SemError(ErrorCode::Def2ViolationInternal, *violation);
  return acc;
}

AccessorySet find_accessory_set(const CausalDiagram& d, int j) {
  const FlowNetwork net = build_flow_network(d, j);
  const std::vector<std::vector<int>> network_paths = max_flow(net);
  std::vector<DiagramPath> paths = interpret_paths(net, network_paths);
  return fixup_and_assemble(d, j, std::move(paths));
}

std::optional<std::string> accessory_set_violation(const CausalDiagram& d, int j,
                                                   const AccessorySet& acc) {
  const int k = acc.size();
  if (static_cast<int>(acc.ends.size()) != k ||
      static_cast<int>(acc.paths.size()) != k)
    return "source, end, and path counts differ";
  const VariableClassification cls = classify(d, j);
  auto contains = [](const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  if (std::set<int>(acc.sources.begin(), acc.sources.end()).size() != size_t(k))
    return "duplicate source variable";
  if (std::set<int>(acc.ends.begin(), acc.ends.end()).size() != size_t(k))
    return "duplicate end variable";

  for (int i = 0; i < k; ++i) {
    const DiagramPath& p = acc.paths[i];
    if (p.nodes.empty() || p.edges.size() + 1 != p.nodes.size())
      return "malformed path";
    if (p.source() != acc.sources[i] || p.end() != acc.ends[i])
      return "path endpoints disagree with the source/end lists";
    if (!contains(cls.non_parents, acc.sources[i]))
      return d.name(acc.sources[i]) + " is not a non-parent of the target";
    if (!contains(cls.error_correlated, acc.ends[i]))
      return d.name(acc.ends[i]) + " is not error-correlated with the target";
    if (std::set<int>(p.nodes.begin(), p.nodes.end()).size() != p.nodes.size())
      return "path revisits a variable";
    for (size_t e = 0; e < p.edges.size(); ++e) {
      const int a = p.nodes[e], b = p.nodes[e + 1];
      if (p.edges[e].kind == EdgeKind::Bidirected) {
        if (!d.has_bidirected(a, b)) return "path uses a missing bidirected edge";
      } else {
        const int tail = p.edges[e].reversed ? b : a;
        const int head = p.edges[e].reversed ? a : b;
        if (!d.has_directed(tail, head)) return "path uses a missing directed edge";
      }
    }
    if (p.degenerate()) {
      if (p.source() != p.end()) return "degenerate path with distinct endpoints";
      continue;
    }
    if (!(p.source() < p.end()))
      return "path source is not ordered before its end";
    for (size_t pos = 1; pos + 1 < p.nodes.size(); ++pos) {
      if (!collider_at(p, static_cast<int>(pos)))
        return "intermediate path node is not a collider";
      if (!(p.nodes[pos] < p.end()))
        return "intermediate path node is ordered after the end";
    }
  }

  // Pairwise conditions: disjoint edges; a shared variable must be the source
  // of one path, entered as a collider (or pointed at, when it is the other
  // path's end), with that source path leaving on a tail.
  for (int i = 0; i < k; ++i) {
    std::set<std::tuple<int, int, int>> edges_i;
    for (size_t e = 0; e < acc.paths[i].edges.size(); ++e)
      edges_i.insert(edge_key(acc.paths[i], static_cast<int>(e)));
    for (int l = i + 1; l < k; ++l) {
      for (size_t e = 0; e < acc.paths[l].edges.size(); ++e)
        if (edges_i.count(edge_key(acc.paths[l], static_cast<int>(e))))
          return "paths share an edge";
      for (int v : acc.paths[i].nodes) {
        if (!std::count(acc.paths[l].nodes.begin(), acc.paths[l].nodes.end(), v))
          continue;
        auto shared_ok = [&](const DiagramPath& p, const DiagramPath& q) {
          // v must be q's source, q must not be degenerate or point at v,
          // and p must collide at v (or end at v with an arrowhead).
          if (v != q.source() || q.source() == q.end()) return false;
          if (arrow_at_left(q.edges[0])) return false;
          if (v == p.end())
            return !p.edges.empty() && arrow_at_right(p.edges.back());
          for (size_t pos = 1; pos + 1 < p.nodes.size(); ++pos)
            if (p.nodes[pos] == v) return collider_at(p, static_cast<int>(pos));
          return false;
        };
        if (!shared_ok(acc.paths[i], acc.paths[l]) &&
            !shared_ok(acc.paths[l], acc.paths[i]))
          return "paths share variable " + d.name(v) + " illegally";
      }
    }
  }
  return std::nullopt;
}

std::string dump_network(const FlowNetwork& net) {
  std::string out;
  auto label = [&](int node) -> std::string {
    if (node == net.source) return "s";
    if (node == net.sink) return "t";
    const int var = (node - 2) / 4;
    const bool plus = node >= FlowNetwork::plus_in(var);
    return net.variable_names[var] + (plus ? "+" : "-");
  };
  for (const FlowArc& arc : net.arcs) {
    if (arc.meaning.kind == FlowArcMeaning::Kind::Split) continue;
    out += label(arc.from) + " -> " + label(arc.to) + " cap=1 [";
    switch (arc.meaning.kind) {
      case FlowArcMeaning::Kind::Node:
        out += "node " + net.variable_names[arc.meaning.a];
        break;
      case FlowArcMeaning::Kind::DirectedEdge:
        out += "edge " + net.variable_names[arc.meaning.a] + " -> " +
               net.variable_names[arc.meaning.b];
        break;
      case FlowArcMeaning::Kind::BidirectedEdge:
        out += "edge " + net.variable_names[arc.meaning.a] + " <-> " +
               net.variable_names[arc.meaning.b];
        break;
      case FlowArcMeaning::Kind::FromSource:
        out += net.variable_names[arc.meaning.a] + " in NP";
        break;
      case FlowArcMeaning::Kind::ToSink:
        out += net.variable_names[arc.meaning.a] + " in Ne";
        break;
      case FlowArcMeaning::Kind::Split:
        break;
    }
    out += "]\n";
  }
  return out;
}

}  // namespace semid
