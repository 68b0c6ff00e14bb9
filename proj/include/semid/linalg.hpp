#pragma once

#include <cstdint>
#include <vector>

namespace semid {

// Dense row-major matrix. Everything in this project is at most a few dozen
// rows, so no effort is spent on blocking or views.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  int rows_, cols_;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Cholesky factorization A = L L^T of a symmetric matrix. Returns false when
// a pivot drops below `tol` times the largest diagonal entry (not PD).
bool cholesky(const Matrix& a, Matrix& lower, double tol = 1e-12);

bool is_positive_definite(const Matrix& a, double tol = 1e-12);

// Solve A x = b for symmetric positive definite A.
// Throws SemError(SingularSubmatrix) when the factorization fails.
std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b,
                              double tol = 1e-12);

// Determinant via LU with partial pivoting.
double determinant(const Matrix& a);

// Partial regression coefficient of x_j in the regression of x_i on
// {x_j} union S, computed from a covariance matrix:
//   (sigma_ij - Sigma_iS Sigma_SS^-1 Sigma_jS) /
//   (sigma_jj - Sigma_jS Sigma_SS^-1 Sigma_jS)
// Throws SemError(SingularSubmatrix) when Sigma_SS is singular to tolerance,
// and SemError(DivisionByZero) when the denominator vanishes.
double partial_regression_value(const Matrix& sigma, int i, int j,
                                const std::vector<int>& cond);

// Deterministic counter-based random stream (splitmix64). A stream is a pure
// function of its seed; `mix` derives independent per-trial seeds.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  static uint64_t mix(uint64_t seed, uint64_t counter);

  uint64_t next_u64();
  // uniform in [0, 1)
  double uniform();
  // uniform in [lo, hi)
  double uniform(double lo, double hi);
  // magnitude uniform in [lo, hi), sign chosen by a fair coin
  double signed_magnitude(double lo, double hi);

 private:
  uint64_t state_;
};

}  // namespace semid
