#include "semid/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "semid/errors.hpp"

namespace semid {

bool CausalDiagram::has_directed(int tail, int head) const {
  return std::binary_search(directed_edges.begin(), directed_edges.end(),
                            std::make_pair(tail, head));
}

bool CausalDiagram::has_bidirected(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(bidirected_edges.begin(), bidirected_edges.end(),
                            std::make_pair(a, b));
}

int CausalDiagram::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (variables[i] == name) return i;
  throw SemError(ErrorCode::UnknownVariable, "unknown variable: " + name);
}

const std::string& CausalDiagram::name(int index) const {
  if (index < 0 || index >= size())
    throw SemError(ErrorCode::IndexOutOfRange,
                   "variable index " + std::to_string(index) + " out of range");
  return variables[index];
}

CausalDiagram build_diagram_indices(std::vector<std::string> names,
                                    std::vector<std::pair<int, int>> directed,
                                    std::vector<std::pair<int, int>> bidirected) {
  const int n = static_cast<int>(names.size());
  {
    std::set<std::string> seen;
    for (const auto& name : names) {
      if (name.empty())
        throw SemError(ErrorCode::SyntaxError, "empty variable name");
      if (!seen.insert(name).second)
        throw SemError(ErrorCode::DuplicateVariable, "duplicate variable: " + name);
    }
  }
  auto check_range = [n](int idx) {
    if (idx < 0 || idx >= n)
      throw SemError(ErrorCode::IndexOutOfRange,
                     "edge endpoint " + std::to_string(idx) + " out of range");
  };
  for (auto& [tail, head] : directed) {
    check_range(tail);
    check_range(head);
    if (tail == head)
      throw SemError(ErrorCode::SelfLoop, "self loop on " + names[tail]);
    if (tail > head)
      throw SemError(ErrorCode::OrderViolation,
                     "directed edge " + names[tail] + " -> " + names[head] +
                         " runs against the causal order");
  }
  for (auto& [a, b] : bidirected) {
    check_range(a);
    check_range(b);
    if (a == b)
      throw SemError(ErrorCode::SelfLoop, "self loop on " + names[a]);
    if (a > b) std::swap(a, b);
  }
  std::sort(directed.begin(), directed.end());
  std::sort(bidirected.begin(), bidirected.end());
  if (std::adjacent_find(directed.begin(), directed.end()) != directed.end())
    throw SemError(ErrorCode::SyntaxError, "duplicate directed edge");
  if (std::adjacent_find(bidirected.begin(), bidirected.end()) != bidirected.end())
    throw SemError(ErrorCode::SyntaxError, "duplicate bidirected edge");
  return CausalDiagram{std::move(names), std::move(directed), std::move(bidirected)};
}

CausalDiagram build_diagram(
    const std::vector<std::string>& names,
    const std::vector<std::pair<std::string, std::string>>& directed,
    const std::vector<std::pair<std::string, std::string>>& bidirected) {
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(names.size()); ++i) {
    if (names[i].empty())
      throw SemError(ErrorCode::SyntaxError, "empty variable name");
    if (!index.emplace(names[i], i).second)
      throw SemError(ErrorCode::DuplicateVariable, "duplicate variable: " + names[i]);
  }
  auto resolve = [&index](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end())
      throw SemError(ErrorCode::UnknownVariable, "unknown variable: " + name);
    return it->second;
  };
  std::vector<std::pair<int, int>> dir, bidir;
  dir.reserve(directed.size());
  bidir.reserve(bidirected.size());
  for (const auto& [a, b] : directed) dir.emplace_back(resolve(a), resolve(b));
  for (const auto& [a, b] : bidirected) bidir.emplace_back(resolve(a), resolve(b));
  return build_diagram_indices(names, std::move(dir), std::move(bidir));
}

std::vector<ValidationIssue> validate_parameterization(const Parameterization& p) {
  std::vector<ValidationIssue> problems;
  const CausalDiagram& d = p.diagram;
  const int n = d.size();
  if (p.coefficients.rows() != n || p.coefficients.cols() != n ||
      p.error_covariance.rows() != n || p.error_covariance.cols() != n) {
    problems.push_back({ErrorCode::DimensionMismatch,
                        "matrix dimensions do not match diagram size"});
    return problems;
  }
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const bool edge = k < j && d.has_directed(k, j);
      const bool nonzero = p.coefficients(j, k) != 0.0;
      if (edge && !nonzero)
        problems.push_back({ErrorCode::SupportMismatch,
                            "zero coefficient on declared edge " + d.variables[k] +
                                " -> " + d.variables[j]});
      if (!edge && nonzero)
        problems.push_back({ErrorCode::SupportMismatch,
                            "nonzero coefficient without edge " + d.variables[k] +
                                " -> " + d.variables[j]});
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (p.error_covariance(i, j) != p.error_covariance(j, i)) {
        problems.push_back({ErrorCode::NotSymmetric,
                            "error covariance not symmetric at " + d.variables[i] +
                                ", " + d.variables[j]});
        continue;
      }
      const bool edge = d.has_bidirected(i, j);
      const bool nonzero = p.error_covariance(i, j) != 0.0;
      if (edge && !nonzero)
        problems.push_back({ErrorCode::SupportMismatch,
                            "zero error covariance on declared edge " +
                                d.variables[i] + " <-> " + d.variables[j]});
      if (!edge && nonzero)
        problems.push_back({ErrorCode::SupportMismatch,
                            "nonzero error covariance without edge " +
                                d.variables[i] + " <-> " + d.variables[j]});
    }
  if (!is_positive_definite(p.error_covariance))
    problems.push_back({ErrorCode::NotPositiveDefinite,
                        "error covariance is not positive definite"});
  return problems;
}

}  // namespace semid
