#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "semid/model.hpp"
#include "semid/solver.hpp"

namespace semid {

// A parsed model file. The line map records the source line of every edge
// (kind 0 = directed, 1 = bidirected, endpoints in storage order) so later
// diagnostics can point at the input.
struct ModelDocument {
  CausalDiagram diagram;
  std::string source_name;
  std::map<std::tuple<int, int, int>, int> line_map;
};

// Line format: `#` comments, one `var` line naming all variables in causal
// order, then `A -> B` and `A <-> B` edge lines. Errors carry line numbers.
ModelDocument parse_model(const std::string& text, const std::string& source_name = "");

// Canonical form: var line, directed edges by (tail, head), bidirected edges
// by (lo, hi), one per line, trailing newline. parse(serialize(d)) == d.
std::string serialize_model(const CausalDiagram& d);

// CSV with a header of variable names followed by an n-by-n numeric block.
// A header that permutes `expected_labels` is reordered to match; `reordered`
// reports when that happened.
CovarianceMatrix parse_covariance(const std::string& text,
                                  const std::vector<std::string>& expected_labels,
                                  bool* reordered = nullptr);

enum class ReportFormat { Text, Json };

std::string render_report(const CausalDiagram& d, const IdentificationResult& result,
                          ReportFormat format);
std::string render_report(const CausalDiagram& d,
                          const std::vector<IdentificationResult>& results,
                          ReportFormat format);

// "Z -> X <-> W" (degenerate paths are the bare node name).
std::string path_to_string(const CausalDiagram& d, const DiagramPath& path);

// "(Z): b(Y,Z|X) = -b(X,Z)*a{Y,X}" in the layout of the printed equations.
std::string render_equation(const CausalDiagram& d, const PregEquation& eq);

}  // namespace semid
