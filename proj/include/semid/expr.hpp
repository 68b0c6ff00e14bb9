#pragma once

#include <memory>
#include <string>
#include <vector>

#include "semid/model.hpp"

namespace semid {

// Immutable expression DAG over partial-regression-coefficient atoms
// b(j, k | S), real constants, and rational arithmetic. The factory functions
// apply only cheap structural folds (double negation, multiplication by
// literal one, sign pull-out) so printed formulas stay close to the shapes
// produced by hand; no canonicalization is attempted.
class SymExpr {
 public:
  enum class Kind { Const, Beta, Neg, Add, Sub, Mul, Div };

  SymExpr() = default;

  static SymExpr constant(double value);
  // beta_{jk.cond}: coefficient of V_k in the regression of V_j on {V_k}+cond.
  static SymExpr beta(int j, int k, std::vector<int> cond);
  static SymExpr neg(const SymExpr& x);
  static SymExpr add(const SymExpr& a, const SymExpr& b);
  static SymExpr sub(const SymExpr& a, const SymExpr& b);
  static SymExpr mul(const SymExpr& a, const SymExpr& b);
  static SymExpr div(const SymExpr& a, const SymExpr& b);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  double constant_value() const;        // Const only
  int beta_target() const;              // Beta only
  int beta_regressor() const;           // Beta only
  const std::vector<int>& beta_conditioning() const;
  int operand_count() const;
  const SymExpr& operand(int i) const;

  bool is_literal_zero() const;
  bool is_literal(double v) const;

  // Stable identity of the underlying node (DAG sharing).
  const void* id() const { return node_.get(); }

 private:
  struct Node;
  explicit SymExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct EvalResult {
  double value = 0.0;
  double scale = 0.0;  // largest magnitude seen at any node
};

// Folds the expression over a covariance matrix. Beta atoms use the
// covariance-based partial regression formula. Throws SingularSubmatrix or
// DivisionByZero (divisor magnitude below 1e-12).
EvalResult evaluate_scaled(const SymExpr& e, const Matrix& sigma);
double evaluate(const SymExpr& e, const CovarianceMatrix& sigma);

std::string to_string(const SymExpr& e, const CausalDiagram& d);

// Structural numerator/denominator split: view the expression as a ratio of
// two division-free expressions without any cancellation. Used to clear
// denominators when emitting covariance constraints.
struct RatioForm {
  SymExpr numerator;
  SymExpr denominator;  // literal 1 when the expression is division-free
};
RatioForm as_ratio(const SymExpr& e);

// Number of distinct nodes in the expression DAG.
int node_count(const SymExpr& e);

}  // namespace semid
