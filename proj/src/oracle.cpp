#include "semid/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "semid/errors.hpp"
#include "semid/graph.hpp"

namespace semid {

CovarianceMatrix implied_covariance(const Parameterization& p) {
  const int n = p.diagram.size();
  // A = (I - C)^-1 by forward substitution, column by column.
  Matrix a(n, n);
  for (int col = 0; col < n; ++col) {
    for (int row = 0; row < n; ++row) {
      double s = (row == col) ? 1.0 : 0.0;
      for (int k = col; k < row; ++k) s += p.coefficients(row, k) * a(k, col);
      a(row, col) = s;
    }
  }
  Matrix sigma = matmul(matmul(a, p.error_covariance), transpose(a));
  // Force exact symmetry against round-off.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (sigma(i, j) + sigma(j, i));
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
  return CovarianceMatrix{p.diagram.variables, std::move(sigma)};
}

Parameterization standardize(const Parameterization& p) {
  const CovarianceMatrix sigma = implied_covariance(p);
  const int n = p.diagram.size();
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = 1.0 / std::sqrt(sigma.values(i, i));
  Parameterization out = p;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) out.coefficients(j, k) = d[j] / d[k] * p.coefficients(j, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.error_covariance(i, j) = d[i] * d[j] * p.error_covariance(i, j);
  return out;
}

double partial_regression(const CovarianceMatrix& sigma, int i, int j,
                          const std::vector<int>& cond) {
  const int n = sigma.size();
  auto in_range = [n](int v) { return v >= 0 && v < n; };
  if (!in_range(i) || !in_range(j) || i == j)
    throw SemError(ErrorCode::IndexOutOfRange, "bad regression indices");
  for (int c : cond)
    if (!in_range(c) || c == i || c == j)
      throw SemError(ErrorCode::IndexOutOfRange, "bad conditioning index");
  return partial_regression_value(sigma.values, i, j, cond);
}

GramSchmidtResult gram_schmidt_alphas(const Matrix& psi) {
  const int n = psi.rows();
  GramSchmidtResult out{Matrix(n, n), std::vector<double>(n, 0.0)};
  // m(j, k) = Cov(eps_j, eps'_k), filled for k < j as the recursion advances.
  Matrix m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < j; ++k) {
      double v = psi(j, k);
      for (int r = 0; r < k; ++r) v -= out.alphas(k, r) * m(j, r);
      m(j, k) = v;
      if (out.variances[k] < 1e-12)
        throw SemError(ErrorCode::NonPositiveVariance,
                       "orthogonalized error variance vanished");
      out.alphas(j, k) = v / out.variances[k];
    }
    double vj = psi(j, j);
    for (int r = 0; r < j; ++r) vj -= out.alphas(j, r) * out.alphas(j, r) * out.variances[r];
    if (vj < 1e-12)
      throw SemError(ErrorCode::NonPositiveVariance,
                     "orthogonalized error variance vanished");
    out.variances[j] = vj;
  }
  return out;
}

Parameterization random_parameterization(const CausalDiagram& d, uint64_t seed) {
  const int n = d.size();
  Rng rng(seed);
  Parameterization p{d, Matrix(n, n), Matrix(n, n)};
  for (const auto& [tail, head] : d.directed_edges)
    p.coefficients(head, tail) = rng.signed_magnitude(0.5, 1.5);
  for (const auto& [a, b] : d.bidirected_edges) {
    const double la = rng.uniform(0.4, 0.9);
    const double lb = rng.uniform(0.4, 0.9);
    p.error_covariance(a, b) += la * lb;
    p.error_covariance(b, a) = p.error_covariance(a, b);
    p.error_covariance(a, a) += la * la;
    p.error_covariance(b, b) += lb * lb;
  }
  for (int i = 0; i < n; ++i) p.error_covariance(i, i) += 0.5;
  return standardize(p);
}

double OracleTrial::beta(int j, int k) const {
  return partial_regression(sigma, j, k, s_set(param.diagram, j, k));
}

double OracleTrial::beta(int i, int j, const std::vector<int>& cond) const {
  return partial_regression(sigma, i, j, cond);
}

double OracleTrial::regression_identity_residual() const {
  const int n = param.diagram.size();
  double worst = 0.0;
  for (int j = 1; j < n; ++j)
    for (int k = 0; k < j; ++k) {
      double rhs = param.coefficients(j, k) + alphas(j, k);
      for (int l = k + 1; l < j; ++l)
        rhs -= beta(l, k) * alphas(j, l);
      worst = std::max(worst, std::abs(beta(j, k) - rhs));
    }
  return worst;
}

OracleTrial make_trial(const CausalDiagram& d, uint64_t seed, uint64_t trial_index) {
  OracleTrial t;
  t.seed = Rng::mix(seed, trial_index);
  t.param = random_parameterization(d, t.seed);
  t.sigma = implied_covariance(t.param);
  GramSchmidtResult gs = gram_schmidt_alphas(t.param.error_covariance);
  t.alphas = std::move(gs.alphas);
  t.error_variances = std::move(gs.variances);
  return t;
}

}  // namespace semid
