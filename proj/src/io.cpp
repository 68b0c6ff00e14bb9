#include "semid/io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "semid/errors.hpp"

namespace semid {

namespace {

std::string trim(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

ModelDocument parse_model(const std::string& text, const std::string& source_name) {
  ModelDocument doc;
  doc.source_name = source_name;

  std::vector<std::string> names;
  std::map<std::string, int> index;
  bool have_var = false;
  int var_line = 0;
  std::vector<std::pair<int, int>> directed, bidirected;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::vector<std::string> tokens = split_ws(line);

    if (tokens[0] == "var") {
      if (have_var)
        throw SemError(ErrorCode::SyntaxError, "duplicate var line (first at line " +
                                                   std::to_string(var_line) + ")",
                       line_no);
      if (tokens.size() < 2)
        throw SemError(ErrorCode::SyntaxError, "var line names no variables", line_no);
      for (size_t i = 1; i < tokens.size(); ++i) {
        if (!index.emplace(tokens[i], static_cast<int>(names.size())).second)
          throw SemError(ErrorCode::DuplicateVariable,
                         "duplicate variable: " + tokens[i], line_no);
        names.push_back(tokens[i]);
      }
      have_var = true;
      var_line = line_no;
      continue;
    }
    if (!have_var)
      throw SemError(ErrorCode::MissingVarLine,
                     "expected a var line before any edges", line_no);
    if (tokens.size() != 3 || (tokens[1] != "->" && tokens[1] != "<->"))
      throw SemError(ErrorCode::SyntaxError,
                     "expected 'A -> B' or 'A <-> B', got: " + line, line_no);
    auto resolve = [&](const std::string& name) {
      auto it = index.find(name);
      if (it == index.end())
        throw SemError(ErrorCode::UnknownVariable, "unknown variable: " + name,
                       line_no);
      return it->second;
    };
    const int a = resolve(tokens[0]);
    const int b = resolve(tokens[2]);
    if (a == b)
      throw SemError(ErrorCode::SelfLoop, "self loop on " + tokens[0], line_no);
    if (tokens[1] == "->") {
      if (a > b)
        throw SemError(ErrorCode::OrderViolation,
                       "directed edge " + tokens[0] + " -> " + tokens[2] +
                           " runs against the declared order",
                       line_no);
      if (!doc.line_map.emplace(std::make_tuple(0, a, b), line_no).second)
        throw SemError(ErrorCode::SyntaxError,
                       "duplicate edge " + tokens[0] + " -> " + tokens[2], line_no);
      directed.emplace_back(a, b);
    } else {
      const int lo = std::min(a, b), hi = std::max(a, b);
      if (!doc.line_map.emplace(std::make_tuple(1, lo, hi), line_no).second)
        throw SemError(ErrorCode::SyntaxError,
                       "duplicate edge " + tokens[0] + " <-> " + tokens[2], line_no);
      bidirected.emplace_back(lo, hi);
    }
  }
  if (!have_var)
    throw SemError(ErrorCode::MissingVarLine, "model has no var line", line_no);
  doc.diagram = build_diagram_indices(std::move(names), std::move(directed),
                                      std::move(bidirected));
  return doc;
}

std::string serialize_model(const CausalDiagram& d) {
  std::string out = "var";
  for (const std::string& name : d.variables) out += " " + name;
  out += "\n";
  for (const auto& [tail, head] : d.directed_edges)
    out += d.variables[tail] + " -> " + d.variables[head] + "\n";
  for (const auto& [a, b] : d.bidirected_edges)
    out += d.variables[a] + " <-> " + d.variables[b] + "\n";
  return out;
}

CovarianceMatrix parse_covariance(const std::string& text,
                                  const std::vector<std::string>& expected_labels,
                                  bool* reordered) {
  const int n = static_cast<int>(expected_labels.size());
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string line = trim(raw);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream cells_in(line);
    while (std::getline(cells_in, cell, ',')) cells.push_back(trim(cell));
    rows.push_back(std::move(cells));
  }
  if (rows.empty())
    throw SemError(ErrorCode::DimensionMismatch, "covariance file is empty");
  const std::vector<std::string>& header = rows[0];
  if (static_cast<int>(header.size()) != n)
    throw SemError(ErrorCode::DimensionMismatch,
                   "expected " + std::to_string(n) + " columns, found " +
                       std::to_string(header.size()));
  if (static_cast<int>(rows.size()) != n + 1)
    throw SemError(ErrorCode::DimensionMismatch,
                   "expected " + std::to_string(n) + " data rows, found " +
                       std::to_string(rows.size() - 1));

  // Position of each expected label in the header.
  std::vector<int> where(n, -1);
  for (int h = 0; h < n; ++h) {
    const std::string& label = header[h];
    int hit = -1;
    for (int e = 0; e < n; ++e)
      if (expected_labels[e] == label) {
        hit = e;
        break;
      }
    if (hit < 0)
      throw SemError(ErrorCode::UnknownLabel, "unknown label in header: " + label);
    if (where[hit] >= 0)
      throw SemError(ErrorCode::UnknownLabel, "label repeated in header: " + label);
    where[hit] = h;
  }
  bool permuted = false;
  for (int e = 0; e < n; ++e)
    if (where[e] != e) permuted = true;
  if (reordered) *reordered = permuted;

  Matrix raw_values(n, n);
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(rows[r + 1].size()) != n)
      throw SemError(ErrorCode::DimensionMismatch,
                     "row " + std::to_string(r + 2) + " has " +
                         std::to_string(rows[r + 1].size()) + " cells");
    for (int c = 0; c < n; ++c) {
      try {
        size_t used = 0;
        raw_values(r, c) = std::stod(rows[r + 1][c], &used);
        if (used != rows[r + 1][c].size())
          throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw SemError(ErrorCode::SyntaxError,
                       "bad number '" + rows[r + 1][c] + "' in covariance row " +
                           std::to_string(r + 2));
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double a = raw_values(i, j), b = raw_values(j, i);
      if (std::abs(a - b) > 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}))
        throw SemError(ErrorCode::NotSymmetric,
                       "covariance not symmetric at (" + header[i] + ", " +
                           header[j] + ")");
    }
  Matrix values(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) values(i, j) = raw_values(where[i], where[j]);
  return CovarianceMatrix{expected_labels, std::move(values)};
}

std::string path_to_string(const CausalDiagram& d, const DiagramPath& path) {
  std::string out = d.name(path.nodes[0]);
  for (size_t e = 0; e < path.edges.size(); ++e) {
    out += path.edges[e].kind == EdgeKind::Bidirected ? " <-> " : " -> ";
    out += d.name(path.nodes[e + 1]);
  }
  return out;
}

std::string render_equation(const CausalDiagram& d, const PregEquation& eq) {
  const std::string j = d.name(eq.target);
  std::string rhs;
  if (eq.c_term) rhs += "c{" + j + "," + d.name(eq.name) + "}";
  for (const auto& [i, coeff] : eq.alpha_terms) {
    const std::string alpha = "a{" + j + "," + d.name(i) + "}";
    if (coeff.is_literal(1.0)) {
      rhs += rhs.empty() ? alpha : " + " + alpha;
    } else if (coeff.kind() == SymExpr::Kind::Neg) {
      rhs += (rhs.empty() ? "-" : " - ") + to_string(coeff.operand(0), d) + "*" + alpha;
    } else {
      rhs += (rhs.empty() ? "" : " + ") + to_string(coeff, d) + "*" + alpha;
    }
  }
  if (rhs.empty()) rhs = "0";
  return "(" + d.name(eq.name) + "): " + to_string(eq.lhs, d) + " = " + rhs;
}

namespace {

nlohmann::json expr_to_json(const SymExpr& e, const CausalDiagram& d) {
  using nlohmann::json;
  switch (e.kind()) {
    case SymExpr::Kind::Const:
      return json{{"const", e.constant_value()}};
    case SymExpr::Kind::Beta: {
      json cond = json::array();
      for (int c : e.beta_conditioning()) cond.push_back(d.name(c));
      return json{{"beta", json::array({d.name(e.beta_target()),
                                        d.name(e.beta_regressor()), cond})}};
    }
    case SymExpr::Kind::Neg:
      return json{{"op", "neg"}, {"args", json::array({expr_to_json(e.operand(0), d)})}};
    case SymExpr::Kind::Add:
    case SymExpr::Kind::Sub:
    case SymExpr::Kind::Mul:
    case SymExpr::Kind::Div: {
      const char* name = e.kind() == SymExpr::Kind::Add   ? "add"
                         : e.kind() == SymExpr::Kind::Sub ? "sub"
                         : e.kind() == SymExpr::Kind::Mul ? "mul"
                                                          : "div";
      return json{{"op", name},
                  {"args", json::array({expr_to_json(e.operand(0), d),
                                        expr_to_json(e.operand(1), d)})}};
    }
  }
  return nlohmann::json();
}

nlohmann::json result_to_json(const CausalDiagram& d, const IdentificationResult& r) {
  using nlohmann::json;
  json coefficients = json::array();
  for (const CoefficientResult& c : r.coefficients) {
    json entry{{"target", d.name(r.target)},
               {"source", d.name(c.source)},
               {"status", c.status == CoeffStatus::Identified
                              ? "identified"
                              : "undecided_by_criterion"}};
    entry["formula"] = c.formula ? expr_to_json(*c.formula, d) : json();
    coefficients.push_back(std::move(entry));
  }
  json constraints = json::array();
  for (const SymExpr& e : r.constraints) constraints.push_back(expr_to_json(e, d));
  json sources = json::array(), ends = json::array(), paths = json::array();
  for (int z : r.accessory_set.sources) sources.push_back(d.name(z));
  for (int x : r.accessory_set.ends) ends.push_back(d.name(x));
  for (const DiagramPath& p : r.accessory_set.paths)
    paths.push_back(path_to_string(d, p));
  return json{{"target", d.name(r.target)},
              {"coefficients", std::move(coefficients)},
              {"constraints", std::move(constraints)},
              {"accessory_set",
               json{{"sources", std::move(sources)},
                    {"ends", std::move(ends)},
                    {"paths", std::move(paths)}}},
              {"warnings", r.warnings}};
}

void render_text_into(const CausalDiagram& d, const IdentificationResult& r,
                      std::string& lines, std::string& constraint_lines) {
  for (const CoefficientResult& c : r.coefficients) {
    const std::string label = "c_{" + d.name(r.target) + "," + d.name(c.source) + "}";
    if (c.status == CoeffStatus::Identified)
      lines += "IDENTIFIED " + label + " = " + to_string(*c.formula, d) + "\n";
    else
      lines += "UNDECIDED " + label + "\n";
  }
  for (const SymExpr& e : r.constraints)
    constraint_lines += "  " + to_string(e, d) + " = 0\n";
}

std::string assemble_text(std::string lines, const std::string& constraint_lines,
                          bool any_content) {
  if (!any_content) return "";
  lines += "CONSTRAINTS\n";
  lines += constraint_lines.empty() ? "  (none)\n" : constraint_lines;
  return lines;
}

}  // namespace

std::string render_report(const CausalDiagram& d, const IdentificationResult& result,
                          ReportFormat format) {
  if (format == ReportFormat::Json) return result_to_json(d, result).dump(2) + "\n";
  std::string lines, constraint_lines;
  render_text_into(d, result, lines, constraint_lines);
  return assemble_text(std::move(lines), constraint_lines,
                       !result.coefficients.empty() || !result.constraints.empty());
}

std::string render_report(const CausalDiagram& d,
                          const std::vector<IdentificationResult>& results,
                          ReportFormat format) {
  if (format == ReportFormat::Json) {
    nlohmann::json out{{"results", nlohmann::json::array()}};
    for (const IdentificationResult& r : results)
      out["results"].push_back(result_to_json(d, r));
    return out.dump(2) + "\n";
  }
  std::string lines, constraint_lines;
  bool any = false;
  for (const IdentificationResult& r : results) {
    render_text_into(d, r, lines, constraint_lines);
    any = any || !r.coefficients.empty() || !r.constraints.empty();
  }
  return assemble_text(std::move(lines), constraint_lines, any);
}

}  // namespace semid
