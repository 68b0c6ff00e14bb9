// Command-line front end: identify path coefficients of a model file, print
// its partial regression equations or accessory set, verify identification
// output against sampled covariances, or evaluate formulas on a data file.
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "semid/certify.hpp"
#include "semid/equations.hpp"
#include "semid/errors.hpp"
#include "semid/io.hpp"
#include "semid/solver.hpp"

namespace {

using namespace semid;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SemError(ErrorCode::SyntaxError, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ModelDocument load_model(const std::string& path) {
  return parse_model(read_file(path), path);
}

ReportFormat parse_format(const std::string& name) {
  return name == "json" ? ReportFormat::Json : ReportFormat::Text;
}

int cmd_identify(const std::string& model_path, const std::string& target,
                 const std::string& format) {
  const ModelDocument doc = load_model(model_path);
  if (!target.empty()) {
    const int j = doc.diagram.index_of(target);
    if (j == 0) {  // first in the causal order: no predecessors, nothing to decide
      std::cout << render_report(doc.diagram, std::vector<IdentificationResult>{},
                                 parse_format(format));
      return kExitOk;
    }
    const IdentificationResult result = identify(doc.diagram, j);
    std::cout << render_report(doc.diagram, result, parse_format(format));
  } else {
    std::cout << render_report(doc.diagram, identify_all(doc.diagram),
                               parse_format(format));
  }
  return kExitOk;
}

int cmd_equations(const std::string& model_path, const std::string& target,
                  const std::string& format) {
  const ModelDocument doc = load_model(model_path);
  const CausalDiagram& d = doc.diagram;
  const int j = d.index_of(target);
  if (j < 1)
    throw SemError(ErrorCode::IndexOutOfRange,
                   "target " + target + " has no predecessors");
  if (format == "json") {
    nlohmann::json out{{"target", target}, {"equations", nlohmann::json::array()}};
    for (int k = 0; k < j; ++k)
      out["equations"].push_back(render_equation(d, build_equation(d, j, k)));
    std::cout << out.dump(2) << "\n";
  } else {
    for (int k = 0; k < j; ++k)
      std::cout << render_equation(d, build_equation(d, j, k)) << "\n";
  }
  return kExitOk;
}

int cmd_accessory(const std::string& model_path, const std::string& target,
                  bool dump_flow, const std::string& format) {
  const ModelDocument doc = load_model(model_path);
  const CausalDiagram& d = doc.diagram;
  const int j = d.index_of(target);
  if (j < 1)
    throw SemError(ErrorCode::IndexOutOfRange,
                   "target " + target + " has no predecessors");
  const AccessorySet acc = find_accessory_set(d, j);
  const FlowNetwork net = build_flow_network(d, j);
  if (format == "json") {
    nlohmann::json sources = nlohmann::json::array(), ends = nlohmann::json::array(),
                   paths = nlohmann::json::array();
    for (int z : acc.sources) sources.push_back(d.name(z));
    for (int x : acc.ends) ends.push_back(d.name(x));
    for (const DiagramPath& p : acc.paths) paths.push_back(path_to_string(d, p));
    nlohmann::json out{{"target", target},
                       {"sources", std::move(sources)},
                       {"ends", std::move(ends)},
                       {"paths", std::move(paths)}};
    if (dump_flow) out["network"] = dump_network(net);
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  }
  if (acc.size() == 0) {
    std::cout << "accessory set is empty\n";
  } else {
    std::string line = "Z = {";
    for (int i = 0; i < acc.size(); ++i)
      line += (i ? "," : "") + d.name(acc.sources[i]);
    line += "}; X = {";
    for (int i = 0; i < acc.size(); ++i) line += (i ? "," : "") + d.name(acc.ends[i]);
    line += "}";
    for (int i = 0; i < acc.size(); ++i)
      line += "; p" + std::to_string(i + 1) + ": " + path_to_string(d, acc.paths[i]);
    std::cout << line << "\n";
  }
  if (dump_flow) std::cout << dump_network(net);
  return kExitOk;
}

int cmd_verify(const std::string& model_path, int trials, uint64_t seed, double tol,
               const std::string& format) {
  const ModelDocument doc = load_model(model_path);
  const std::vector<IdentificationResult> results = identify_all(doc.diagram);
  const CertificationReport report = certify(doc.diagram, results, trials, seed, tol);
  if (format == "json") {
    nlohmann::json claims = nlohmann::json::array();
    for (const ClaimCheck& c : report.claims)
      claims.push_back({{"label", c.label},
                        {"passed", c.passed},
                        {"max_residual", c.max_residual},
                        {"failures", c.failures},
                        {"note", c.note}});
    nlohmann::json out{
        {"trials", report.trials},
        {"seed", report.seed},
        {"tolerance", report.tolerance},
        {"max_regression_identity_residual", report.max_regression_identity_residual},
        {"claims", std::move(claims)},
        {"passed", report.all_passed()}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "verify: trials=" << report.trials << " seed=" << report.seed
              << " tol=" << report.tolerance << "\n";
    std::cout << "regression identity residual: "
              << report.max_regression_identity_residual << "\n";
    for (const ClaimCheck& c : report.claims) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.label
                << " max_residual=" << c.max_residual;
      if (!c.passed) std::cout << " failures=" << c.failures << " (" << c.note << ")";
      std::cout << "\n";
    }
    std::cout << (report.all_passed() ? "RESULT PASS" : "RESULT FAIL") << "\n";
  }
  return report.all_passed() ? kExitOk : kExitVerifyFailed;
}

int cmd_eval(const std::string& model_path, const std::string& cov_path, double tol,
             const std::string& format) {
  const ModelDocument doc = load_model(model_path);
  const CausalDiagram& d = doc.diagram;
  bool reordered = false;
  const CovarianceMatrix sigma =
      parse_covariance(read_file(cov_path), d.variables, &reordered);
  const std::vector<IdentificationResult> results = identify_all(d);

  nlohmann::json out{{"estimates", nlohmann::json::array()},
                     {"constraints", nlohmann::json::array()},
                     {"columns_reordered", reordered}};
  std::string text;
  if (reordered) text += "note: covariance columns reordered to match the model order\n";
  for (const IdentificationResult& r : results) {
    for (const CoefficientResult& c : r.coefficients) {
      const std::string label = "c_{" + d.name(r.target) + "," + d.name(c.source) + "}";
      if (c.status != CoeffStatus::Identified) {
        text += "UNDECIDED " + label + "\n";
        out["estimates"].push_back({{"label", label}, {"status", "undecided_by_criterion"}});
        continue;
      }
      try {
        const double value = evaluate(*c.formula, sigma);
        std::ostringstream num;
        num.precision(12);
        num << value;
        text += label + " = " + num.str() + "\n";
        out["estimates"].push_back(
            {{"label", label}, {"status", "identified"}, {"value", value}});
      } catch (const SemError& err) {
        text += label + " = ERROR " + error_code_name(err.code()) + "\n";
        out["estimates"].push_back({{"label", label},
                                    {"status", "error"},
                                    {"error", error_code_name(err.code())}});
      }
    }
    for (size_t i = 0; i < r.constraints.size(); ++i) {
      const std::string label =
          "constraint " + d.name(r.target) + "#" + std::to_string(i + 1);
      try {
        const double value = evaluate(r.constraints[i], sigma);
        const bool ok = std::abs(value) <= tol;
        std::ostringstream num;
        num.precision(6);
        num << value;
        text += label + " = " + num.str() + (ok ? " PASS" : " FAIL") + "\n";
        out["constraints"].push_back(
            {{"label", label}, {"value", value}, {"passed", ok}});
      } catch (const SemError& err) {
        text += label + " = ERROR " + error_code_name(err.code()) + "\n";
        out["constraints"].push_back(
            {{"label", label}, {"error", error_code_name(err.code())}});
      }
    }
  }
  if (format == "json")
    std::cout << out.dump(2) << "\n";
  else
    std::cout << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Path-coefficient identification for recursive linear SEMs"};
  app.require_subcommand(1);

  std::string model_path, target, format = "text", cov_path;
  int trials = 100;
  uint64_t seed = 0;
  double tol = 1e-6;
  bool dump_flow = false;

  CLI::App* identify = app.add_subcommand(
      "identify", "Decide which path coefficients the covariances determine");
  identify->add_option("model", model_path, "model file")->required();
  identify->add_option("--target", target, "only this variable's coefficients");
  identify->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  CLI::App* equations = app.add_subcommand(
      "equations", "Print the partial regression equations for one target");
  equations->add_option("model", model_path, "model file")->required();
  equations->add_option("--target", target, "target variable")->required();
  equations->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  CLI::App* accessory = app.add_subcommand(
      "accessory", "Show a maximum accessory set for one target");
  accessory->add_option("model", model_path, "model file")->required();
  accessory->add_option("--target", target, "target variable")->required();
  accessory->add_flag("--dump-flow", dump_flow, "also print the flow network arcs");
  accessory->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  CLI::App* verify = app.add_subcommand(
      "verify", "Certify identification output on sampled covariances");
  verify->add_option("model", model_path, "model file")->required();
  verify->add_option("--trials", trials, "number of sampled models");
  verify->add_option("--seed", seed, "base seed");
  verify->add_option("--tol", tol, "relative tolerance");
  verify->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  CLI::App* eval = app.add_subcommand(
      "eval", "Evaluate identification formulas on a covariance file");
  eval->add_option("model", model_path, "model file")->required();
  eval->add_option("--cov", cov_path, "covariance CSV")->required();
  eval->add_option("--tol", tol, "constraint tolerance");
  eval->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
    if (identify->parsed()) return cmd_identify(model_path, target, format);
    if (equations->parsed()) return cmd_equations(model_path, target, format);
    if (accessory->parsed()) return cmd_accessory(model_path, target, dump_flow, format);
    if (verify->parsed()) return cmd_verify(model_path, trials, seed, tol, format);
    if (eval->parsed()) return cmd_eval(model_path, cov_path, tol, format);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  } catch (const semid::SemError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
