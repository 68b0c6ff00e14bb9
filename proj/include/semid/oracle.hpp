#pragma once

#include <cstdint>
#include <vector>

#include "semid/model.hpp"

namespace semid {

// Sigma = (I - C)^-1 Psi (I - C)^-T. C is strictly lower triangular on the
// causal order, so (I - C) is unit lower triangular and always invertible.
CovarianceMatrix implied_covariance(const Parameterization& p);

// Rescales the model so every variable has implied variance 1:
// c'_jk = (d_j / d_k) c_jk and psi'_ij = d_i d_j psi_ij with d_i = sigma_ii^-1/2.
Parameterization standardize(const Parameterization& p);

double partial_regression(const CovarianceMatrix& sigma, int i, int j,
                          const std::vector<int>& cond);

struct GramSchmidtResult {
  Matrix alphas;                  // strictly lower triangular
  std::vector<double> variances;  // Var of each orthogonalized error
};

// Orthogonalizes the error terms recursively in covariance space:
//   m_jk = psi_jk - sum_{r<k} alpha_kr m_jr,   alpha_jk = m_jk / v_k,
//   v_j  = psi_jj - sum_{r<j} alpha_jr^2 v_r.
// Equivalent to the unit lower triangular factorization Psi = L D L^T.
// Throws NonPositiveVariance when some v_k falls below tolerance.
GramSchmidtResult gram_schmidt_alphas(const Matrix& psi);

// Generic parameters for a diagram, reproducible from the seed alone:
// coefficient magnitudes in [0.5, 1.5) with random sign; error covariance from
// one latent per bidirected edge (loadings in [0.4, 0.9)) plus diagonal slack,
// which keeps Psi positive definite with support exactly the bidirected
// edges. The result is standardized.
Parameterization random_parameterization(const CausalDiagram& d, uint64_t seed);

// One sampled model with everything the checks need precomputed.
struct OracleTrial {
  Parameterization param;  // standardized
  CovarianceMatrix sigma;
  Matrix alphas;
  std::vector<double> error_variances;
  uint64_t seed = 0;

  // beta_{jk.S_jk} with the standard conditioning set.
  double beta(int j, int k) const;
  double beta(int i, int j, const std::vector<int>& cond) const;
  // Largest residual of the partial regression identity
  // beta_jk = c_jk + alpha_jk - sum_l beta_lk alpha_jl over all (j, k).
  double regression_identity_residual() const;
};

OracleTrial make_trial(const CausalDiagram& d, uint64_t seed, uint64_t trial_index);

}  // namespace semid
