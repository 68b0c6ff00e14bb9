#include "semid/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "semid/errors.hpp"

namespace semid {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

bool cholesky(const Matrix& a, Matrix& lower, double tol) {
  const int n = a.rows();
  lower = Matrix(n, n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
  if (scale == 0.0) scale = 1.0;
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
    if (d <= tol * scale) return false;
    lower(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / lower(j, j);
    }
  }
  return true;
}

bool is_positive_definite(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  Matrix lower;
  return cholesky(a, lower, tol);
}

std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b, double tol) {
  const int n = a.rows();
  Matrix lower;
  if (!cholesky(a, lower, tol))
    throw SemError(ErrorCode::SingularSubmatrix,
                   "symmetric solve failed: matrix not positive definite to tolerance");
  std::vector<double> y(n), x(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= lower(i, k) * y[k];
    y[i] = s / lower(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= lower(k, i) * x[k];
    x[i] = s / lower(i, i);
  }
  return x;
}

double determinant(const Matrix& a) {
  const int n = a.rows();
  Matrix lu = a;
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(pivot, col))) pivot = r;
    if (lu(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(lu(pivot, c), lu(col, c));
      det = -det;
    }
    det *= lu(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double f = lu(r, col) / lu(col, col);
      for (int c = col; c < n; ++c) lu(r, c) -= f * lu(col, c);
    }
  }
  return det;
}

double partial_regression_value(const Matrix& sigma, int i, int j,
                                const std::vector<int>& cond) {
  const int m = static_cast<int>(cond.size());
  double num = sigma(i, j);
  double den = sigma(j, j);
  if (m > 0) {
    Matrix sub(m, m);
    std::vector<double> si(m), sj(m);
    for (int r = 0; r < m; ++r) {
      si[r] = sigma(i, cond[r]);
      sj[r] = sigma(j, cond[r]);
      for (int c = 0; c < m; ++c) sub(r, c) = sigma(cond[r], cond[c]);
    }
    const std::vector<double> w = solve_spd(sub, sj);
    for (int r = 0; r < m; ++r) {
      num -= si[r] * w[r];
      den -= sj[r] * w[r];
    }
  }
  if (std::abs(den) < 1e-12)
    throw SemError(ErrorCode::DivisionByZero,
                   "partial regression denominator vanished");
  return num / den;
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateVariable: return "DuplicateVariable";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::OrderViolation: return "OrderViolation";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::MissingVarLine: return "MissingVarLine";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EndpointInConditioningSet: return "EndpointInConditioningSet";
    case ErrorCode::NotAParent: return "NotAParent";
    case ErrorCode::InvalidExpression: return "InvalidExpression";
    case ErrorCode::SingularSubmatrix: return "SingularSubmatrix";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::IllConditionedExpression: return "IllConditionedExpression";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::MalformedPath: return "MalformedPath";
    case ErrorCode::Def2ViolationInternal: return "Def2ViolationInternal";
    case ErrorCode::DegenerateBlock: return "DegenerateBlock";
  }
  return "Unknown";
}

uint64_t Rng::mix(uint64_t seed, uint64_t counter) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::signed_magnitude(double lo, double hi) {
  const double mag = uniform(lo, hi);
  return (next_u64() & 1) ? mag : -mag;
}

}  // namespace semid
