#include "semid/certify.hpp"

#include <cmath>

#include "semid/errors.hpp"

namespace semid {

bool CertificationReport::all_passed() const {
  for (const ClaimCheck& c : claims)
    if (!c.passed) return false;
  return true;
}

CertificationReport certify(const CausalDiagram& d,
                            const std::vector<IdentificationResult>& results,
                            int trials, uint64_t seed, double tolerance) {
  CertificationReport report;
  report.trials = trials;
  report.seed = seed;
  report.tolerance = tolerance;

  struct Claim {
    std::string label;
    const SymExpr* expr;
    int target, source;  // source < 0 marks a constraint
  };
  std::vector<Claim> claims;
  for (const IdentificationResult& r : results) {
    for (const CoefficientResult& c : r.coefficients)
      if (c.status == CoeffStatus::Identified)
        claims.push_back({"c{" + d.name(r.target) + "," + d.name(c.source) + "}",
                          &*c.formula, r.target, c.source});
    for (size_t i = 0; i < r.constraints.size(); ++i)
      claims.push_back({"constraint " + d.name(r.target) + "#" + std::to_string(i + 1),
                        &r.constraints[i], r.target, -1});
  }
  report.claims.resize(claims.size());
  for (size_t i = 0; i < claims.size(); ++i) report.claims[i].label = claims[i].label;

  for (int t = 0; t < trials; ++t) {
    const OracleTrial trial = make_trial(d, seed, static_cast<uint64_t>(t));
    report.max_regression_identity_residual =
        std::max(report.max_regression_identity_residual,
                 trial.regression_identity_residual());
    for (size_t i = 0; i < claims.size(); ++i) {
      ClaimCheck& check = report.claims[i];
      try {
        const double value = evaluate(*claims[i].expr, trial.sigma);
        double residual;
        if (claims[i].source >= 0) {
          const double truth = trial.param.coefficients(claims[i].target, claims[i].source);
          residual = std::abs(value - truth) / std::max(1.0, std::abs(truth));
        } else {
          residual = std::abs(value);
        }
        check.max_residual = std::max(check.max_residual, residual);
        if (residual > tolerance) {
          check.passed = false;
          ++check.failures;
          if (check.note.empty())
            check.note = "residual " + std::to_string(residual) + " at trial " +
                         std::to_string(t);
        }
      } catch (const SemError& err) {
        check.passed = false;
        ++check.failures;
        if (check.note.empty())
          check.note = std::string(err.what()) + " at trial " + std::to_string(t);
      }
    }
  }
  return report;
}

}  // namespace semid
