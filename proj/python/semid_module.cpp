// Python bindings for the identification library. Results cross the boundary
// as plain dicts/lists (converted from the JSON report schema) so the module
// has no dependency on numpy or pandas.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "semid/certify.hpp"
#include "semid/equations.hpp"
#include "semid/errors.hpp"
#include "semid/io.hpp"
#include "semid/solver.hpp"

namespace py = pybind11;
using namespace semid;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null:
      return py::none();
    case nlohmann::json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case nlohmann::json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it)
        out[py::str(it.key())] = json_to_py(it.value());
      return out;
    }
    default:
      return py::none();
  }
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw SemError(ErrorCode::DimensionMismatch, "matrix rows have uneven lengths");
    for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<std::vector<double>> matrix_to_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

CovarianceMatrix make_sigma(const CausalDiagram& d,
                            const std::vector<std::vector<double>>& rows) {
  if (static_cast<int>(rows.size()) != d.size())
    throw SemError(ErrorCode::DimensionMismatch,
                   "covariance size does not match the model");
  return CovarianceMatrix{d.variables, rows_to_matrix(rows)};
}

py::object identify_dict(const CausalDiagram& d, const std::string& target) {
  const std::string text =
      target.empty()
          ? render_report(d, identify_all(d), ReportFormat::Json)
          : render_report(d, identify(d, d.index_of(target)), ReportFormat::Json);
  return json_to_py(nlohmann::json::parse(text));
}

}  // namespace

PYBIND11_MODULE(semid, m) {
  m.doc() = "Identification of path coefficients in recursive linear "
            "structural equation models with correlated errors";

  py::register_exception<SemError>(m, "ModelError");

  py::class_<CausalDiagram>(m, "Diagram")
      .def_property_readonly("variables",
                             [](const CausalDiagram& d) { return d.variables; })
      .def_property_readonly("directed_edges",
                             [](const CausalDiagram& d) { return d.directed_edges; })
      .def_property_readonly("bidirected_edges",
                             [](const CausalDiagram& d) { return d.bidirected_edges; })
      .def("__len__", &CausalDiagram::size)
      .def("index_of", &CausalDiagram::index_of, py::arg("name"))
      .def("name", &CausalDiagram::name, py::arg("index"))
      .def("serialize", [](const CausalDiagram& d) { return serialize_model(d); })
      .def("__repr__", [](const CausalDiagram& d) {
        return "<semid.Diagram " + std::to_string(d.size()) + " variables>";
      });

  m.def(
      "parse_model", [](const std::string& text) { return parse_model(text).diagram; },
      py::arg("text"), "Parse the line-oriented model format into a Diagram.");
  m.def(
      "build_diagram",
      [](const std::vector<std::string>& names,
         const std::vector<std::pair<std::string, std::string>>& directed,
         const std::vector<std::pair<std::string, std::string>>& bidirected) {
        return build_diagram(names, directed, bidirected);
      },
      py::arg("names"), py::arg("directed") = std::vector<std::pair<std::string, std::string>>{},
      py::arg("bidirected") = std::vector<std::pair<std::string, std::string>>{});
  m.def("serialize_model", &serialize_model, py::arg("diagram"));

  m.def(
      "classify",
      [](const CausalDiagram& d, const std::string& target) {
        const VariableClassification c = classify(d, d.index_of(target));
        auto names = [&](const std::vector<int>& idx) {
          std::vector<std::string> out;
          for (int i : idx) out.push_back(d.name(i));
          return out;
        };
        py::dict out;
        out["parents"] = names(c.parents);
        out["non_parents"] = names(c.non_parents);
        out["error_correlated"] = names(c.error_correlated);
        return out;
      },
      py::arg("diagram"), py::arg("target"));

  m.def(
      "active_path_exists",
      [](const CausalDiagram& d, const std::string& a, const std::string& b,
         const std::vector<std::string>& given) {
        std::vector<int> cond;
        for (const std::string& g : given) cond.push_back(d.index_of(g));
        return exists_active_path(d, d.index_of(a), d.index_of(b), cond);
      },
      py::arg("diagram"), py::arg("a"), py::arg("b"),
      py::arg("given") = std::vector<std::string>{});

  m.def(
      "accessory_set",
      [](const CausalDiagram& d, const std::string& target) {
        const AccessorySet acc = find_accessory_set(d, d.index_of(target));
        py::dict out;
        std::vector<std::string> sources, ends, paths;
        for (int z : acc.sources) sources.push_back(d.name(z));
        for (int x : acc.ends) ends.push_back(d.name(x));
        for (const DiagramPath& p : acc.paths) paths.push_back(path_to_string(d, p));
        out["sources"] = sources;
        out["ends"] = ends;
        out["paths"] = paths;
        return out;
      },
      py::arg("diagram"), py::arg("target"));

  m.def(
      "equations",
      [](const CausalDiagram& d, const std::string& target) {
        const int j = d.index_of(target);
        std::vector<std::string> out;
        for (int k = 0; k < j; ++k) out.push_back(render_equation(d, build_equation(d, j, k)));
        return out;
      },
      py::arg("diagram"), py::arg("target"),
      "Printed partial regression equations for one target, in order.");

  m.def("identify", &identify_dict, py::arg("diagram"), py::arg("target") = "",
        "Identification results as a dict (all targets when target is empty).");
  m.def(
      "identify_report",
      [](const CausalDiagram& d, const std::string& format) {
        return render_report(d, identify_all(d),
                             format == "json" ? ReportFormat::Json : ReportFormat::Text);
      },
      py::arg("diagram"), py::arg("format") = "text");

  m.def(
      "implied_covariance",
      [](const CausalDiagram& d, const std::vector<std::vector<double>>& coefficients,
         const std::vector<std::vector<double>>& error_covariance) {
        const Parameterization p{d, rows_to_matrix(coefficients),
                                 rows_to_matrix(error_covariance)};
        return matrix_to_rows(implied_covariance(p).values);
      },
      py::arg("diagram"), py::arg("coefficients"), py::arg("error_covariance"));

  m.def(
      "random_parameterization",
      [](const CausalDiagram& d, uint64_t seed) {
        const Parameterization p = random_parameterization(d, seed);
        py::dict out;
        out["coefficients"] = matrix_to_rows(p.coefficients);
        out["error_covariance"] = matrix_to_rows(p.error_covariance);
        return out;
      },
      py::arg("diagram"), py::arg("seed") = 0,
      "Standardized generic parameters whose support matches the diagram.");

  m.def(
      "partial_regression",
      [](const CausalDiagram& d, const std::vector<std::vector<double>>& sigma,
         const std::string& i, const std::string& j,
         const std::vector<std::string>& given) {
        std::vector<int> cond;
        for (const std::string& g : given) cond.push_back(d.index_of(g));
        return partial_regression(make_sigma(d, sigma), d.index_of(i), d.index_of(j), cond);
      },
      py::arg("diagram"), py::arg("sigma"), py::arg("i"), py::arg("j"),
      py::arg("given") = std::vector<std::string>{});

  m.def(
      "gram_schmidt_alphas",
      [](const std::vector<std::vector<double>>& psi) {
        const GramSchmidtResult gs = gram_schmidt_alphas(rows_to_matrix(psi));
        return py::make_tuple(matrix_to_rows(gs.alphas), gs.variances);
      },
      py::arg("error_covariance"));

  m.def(
      "evaluate_coefficients",
      [](const CausalDiagram& d, const std::vector<std::vector<double>>& sigma) {
        const CovarianceMatrix cov = make_sigma(d, sigma);
        py::dict out;
        for (const IdentificationResult& r : identify_all(d))
          for (const CoefficientResult& c : r.coefficients) {
            const std::string label = d.name(r.target) + "<-" + d.name(c.source);
            if (c.status == CoeffStatus::Identified)
              out[py::str(label)] = evaluate(*c.formula, cov);
            else
              out[py::str(label)] = py::none();
          }
        return out;
      },
      py::arg("diagram"), py::arg("sigma"),
      "Numeric estimates of every identified coefficient; None when undecided.");

  m.def(
      "certify",
      [](const CausalDiagram& d, int trials, uint64_t seed, double tolerance) {
        const CertificationReport report = certify(d, identify_all(d), trials, seed, tolerance);
        nlohmann::json claims = nlohmann::json::array();
        for (const ClaimCheck& c : report.claims)
          claims.push_back({{"label", c.label},
                            {"passed", c.passed},
                            {"max_residual", c.max_residual},
                            {"failures", c.failures}});
        const nlohmann::json out{
            {"trials", report.trials},
            {"seed", report.seed},
            {"tolerance", report.tolerance},
            {"max_regression_identity_residual", report.max_regression_identity_residual},
            {"claims", claims},
            {"passed", report.all_passed()}};
        return json_to_py(out);
      },
      py::arg("diagram"), py::arg("trials") = 100, py::arg("seed") = 0,
      py::arg("tolerance") = 1e-6,
      "Check identification output against sampled covariances.");
}
