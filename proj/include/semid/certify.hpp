#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semid/oracle.hpp"
#include "semid/solver.hpp"

namespace semid {

struct ClaimCheck {
  std::string label;
  bool passed = true;
  double max_residual = 0.0;
  int failures = 0;  // trials where the claim missed the tolerance or errored
  std::string note;  // first failure description, if any
};

struct CertificationReport {
  int trials = 0;
  uint64_t seed = 0;
  double tolerance = 0.0;
  double max_regression_identity_residual = 0.0;
  std::vector<ClaimCheck> claims;

  bool all_passed() const;
};

// Monte-Carlo check of identification output: on every sampled standardized
// model, each identified formula must reproduce the true path coefficient to
// tolerance (relative, with floor 1) and each constraint must vanish. Trial
// errors mark the claim failed rather than aborting the batch.
CertificationReport certify(const CausalDiagram& d,
                            const std::vector<IdentificationResult>& results,
                            int trials, uint64_t seed, double tolerance = 1e-6);

}  // namespace semid
