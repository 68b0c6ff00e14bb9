#include "semid/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "semid/errors.hpp"

namespace semid {

struct SymExpr::Node {
  Kind kind;
  double value = 0.0;        // Const
  int j = -1, k = -1;        // Beta
  std::vector<int> cond;     // Beta, sorted
  std::vector<SymExpr> args;
};

SymExpr SymExpr::constant(double value) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Const;
  node->value = value;
  return SymExpr(std::move(node));
}

SymExpr SymExpr::beta(int j, int k, std::vector<int> cond) {
  if (j < 0 || k < 0 || j == k)
    throw SemError(ErrorCode::InvalidExpression, "bad regression atom indices");
  std::sort(cond.begin(), cond.end());
  cond.erase(std::unique(cond.begin(), cond.end()), cond.end());
  for (int c : cond)
    if (c == j || c == k)
      throw SemError(ErrorCode::InvalidExpression,
                     "regression atom conditions on one of its own variables");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Beta;
  node->j = j;
  node->k = k;
  node->cond = std::move(cond);
  return SymExpr(std::move(node));
}

SymExpr SymExpr::neg(const SymExpr& x) {
  if (x.kind() == Kind::Const) return constant(-x.constant_value());
  if (x.kind() == Kind::Neg) return x.operand(0);
  auto node = std::make_shared<Node>();
  node->kind = Kind::Neg;
  node->args = {x};
  return SymExpr(std::move(node));
}

SymExpr SymExpr::add(const SymExpr& a, const SymExpr& b) {
  if (a.is_literal_zero()) return b;
  if (b.is_literal_zero()) return a;
  if (a.kind() == Kind::Const && b.kind() == Kind::Const)
    return constant(a.constant_value() + b.constant_value());
  if (b.kind() == Kind::Neg) return sub(a, b.operand(0));
  auto node = std::make_shared<Node>();
  node->kind = Kind::Add;
  node->args = {a, b};
  return SymExpr(std::move(node));
}

SymExpr SymExpr::sub(const SymExpr& a, const SymExpr& b) {
  if (b.is_literal_zero()) return a;
  if (a.is_literal_zero()) return neg(b);
  if (a.kind() == Kind::Const && b.kind() == Kind::Const)
    return constant(a.constant_value() - b.constant_value());
  if (b.kind() == Kind::Neg) return add(a, b.operand(0));
  auto node = std::make_shared<Node>();
  node->kind = Kind::Sub;
  node->args = {a, b};
  return SymExpr(std::move(node));
}

SymExpr SymExpr::mul(const SymExpr& a, const SymExpr& b) {
  if (a.is_literal_zero() || b.is_literal_zero()) return constant(0.0);
  if (a.is_literal(1.0)) return b;
  if (b.is_literal(1.0)) return a;
  if (a.is_literal(-1.0)) return neg(b);
  if (b.is_literal(-1.0)) return neg(a);
  if (a.kind() == Kind::Const && b.kind() == Kind::Const)
    return constant(a.constant_value() * b.constant_value());
  if (a.kind() == Kind::Neg && b.kind() == Kind::Neg)
    return mul(a.operand(0), b.operand(0));
  if (a.kind() == Kind::Neg) return neg(mul(a.operand(0), b));
  if (b.kind() == Kind::Neg) return neg(mul(a, b.operand(0)));
  auto node = std::make_shared<Node>();
  node->kind = Kind::Mul;
  node->args = {a, b};
  return SymExpr(std::move(node));
}

SymExpr SymExpr::div(const SymExpr& a, const SymExpr& b) {
  if (b.is_literal_zero())
    throw SemError(ErrorCode::DivisionByZero, "division by literal zero");
  if (a.is_literal_zero()) return constant(0.0);
  if (b.is_literal(1.0)) return a;
  if (b.is_literal(-1.0)) return neg(a);
  if (a.kind() == Kind::Const && b.kind() == Kind::Const)
    return constant(a.constant_value() / b.constant_value());
  if (a.kind() == Kind::Neg && b.kind() == Kind::Neg)
    return div(a.operand(0), b.operand(0));
  if (a.kind() == Kind::Neg) return neg(div(a.operand(0), b));
  if (b.kind() == Kind::Neg) return neg(div(a, b.operand(0)));
  auto node = std::make_shared<Node>();
  node->kind = Kind::Div;
  node->args = {a, b};
  return SymExpr(std::move(node));
}

SymExpr::Kind SymExpr::kind() const {
  if (!node_) throw SemError(ErrorCode::InvalidExpression, "empty expression");
  return node_->kind;
}

double SymExpr::constant_value() const { return node_->value; }
int SymExpr::beta_target() const { return node_->j; }
int SymExpr::beta_regressor() const { return node_->k; }
const std::vector<int>& SymExpr::beta_conditioning() const { return node_->cond; }
int SymExpr::operand_count() const { return static_cast<int>(node_->args.size()); }
const SymExpr& SymExpr::operand(int i) const { return node_->args[i]; }

bool SymExpr::is_literal_zero() const { return is_literal(0.0); }

bool SymExpr::is_literal(double v) const {
  return node_ && node_->kind == Kind::Const && node_->value == v;
}

namespace {

double eval_node(const SymExpr& e, const Matrix& sigma,
                 std::unordered_map<const void*, double>& memo, double& scale) {
  auto it = memo.find(e.id());
  if (it != memo.end()) return it->second;
  double v = 0.0;
  switch (e.kind()) {
    case SymExpr::Kind::Const:
      v = e.constant_value();
      break;
    case SymExpr::Kind::Beta: {
      const int n = sigma.rows();
      if (e.beta_target() >= n || e.beta_regressor() >= n)
        throw SemError(ErrorCode::IndexOutOfRange,
                       "regression atom index outside the covariance matrix");
      for (int c : e.beta_conditioning())
        if (c >= n)
          throw SemError(ErrorCode::IndexOutOfRange,
                         "conditioning index outside the covariance matrix");
      v = partial_regression_value(sigma, e.beta_target(), e.beta_regressor(),
                                   e.beta_conditioning());
      break;
    }
    case SymExpr::Kind::Neg:
      v = -eval_node(e.operand(0), sigma, memo, scale);
      break;
    case SymExpr::Kind::Add:
      v = eval_node(e.operand(0), sigma, memo, scale) +
          eval_node(e.operand(1), sigma, memo, scale);
      break;
    case SymExpr::Kind::Sub:
      v = eval_node(e.operand(0), sigma, memo, scale) -
          eval_node(e.operand(1), sigma, memo, scale);
      break;
    case SymExpr::Kind::Mul:
      v = eval_node(e.operand(0), sigma, memo, scale) *
          eval_node(e.operand(1), sigma, memo, scale);
      break;
    case SymExpr::Kind::Div: {
      const double num = eval_node(e.operand(0), sigma, memo, scale);
      const double den = eval_node(e.operand(1), sigma, memo, scale);
      if (std::abs(den) < 1e-12)
        throw SemError(ErrorCode::DivisionByZero, "divisor vanished while folding");
      v = num / den;
      break;
    }
  }
  scale = std::max(scale, std::abs(v));
  memo.emplace(e.id(), v);
  return v;
}

std::string format_number(double v) {
  if (v == static_cast<long long>(v) && std::abs(v) < 1e15)
    return std::to_string(static_cast<long long>(v));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Precedence: additive 1, multiplicative 2, unary minus 3, atoms 4.
std::string render(const SymExpr& e, const CausalDiagram& d, int parent_prec) {
  std::string out;
  int prec = 4;
  switch (e.kind()) {
    case SymExpr::Kind::Const:
      out = format_number(e.constant_value());
      if (e.constant_value() < 0) prec = 3;
      break;
    case SymExpr::Kind::Beta: {
      out = "b(" + d.name(e.beta_target()) + "," + d.name(e.beta_regressor());
      if (!e.beta_conditioning().empty()) {
        out += "|";
        bool first = true;
        for (int c : e.beta_conditioning()) {
          if (!first) out += ",";
          out += d.name(c);
          first = false;
        }
      }
      out += ")";
      break;
    }
    case SymExpr::Kind::Neg:
      // Unary minus binds looser than * and /, so -a/b needs no parentheses.
      out = "-" + render(e.operand(0), d, 2);
      prec = 3;
      break;
    case SymExpr::Kind::Add:
      if (e.operand(1).kind() == SymExpr::Kind::Neg)
        out = render(e.operand(0), d, 1) + " - " + render(e.operand(1).operand(0), d, 2);
      else
        out = render(e.operand(0), d, 1) + " + " + render(e.operand(1), d, 1);
      prec = 1;
      break;
    case SymExpr::Kind::Sub:
      out = render(e.operand(0), d, 1) + " - " + render(e.operand(1), d, 2);
      prec = 1;
      break;
    case SymExpr::Kind::Mul:
      out = render(e.operand(0), d, 2) + "*" + render(e.operand(1), d, 2);
      prec = 2;
      break;
    case SymExpr::Kind::Div:
      out = render(e.operand(0), d, 2) + "/" + render(e.operand(1), d, 3);
      prec = 2;
      break;
  }
  if (prec < parent_prec) return "(" + out + ")";
  return out;
}

}  // namespace

EvalResult evaluate_scaled(const SymExpr& e, const Matrix& sigma) {
  std::unordered_map<const void*, double> memo;
  EvalResult r;
  r.value = eval_node(e, sigma, memo, r.scale);
  return r;
}

double evaluate(const SymExpr& e, const CovarianceMatrix& sigma) {
  return evaluate_scaled(e, sigma.values).value;
}

std::string to_string(const SymExpr& e, const CausalDiagram& d) {
  return render(e, d, 0);
}

int node_count(const SymExpr& e) {
  std::unordered_map<const void*, bool> seen;
  std::vector<SymExpr> stack{e};
  while (!stack.empty()) {
    const SymExpr node = stack.back();
    stack.pop_back();
    if (!seen.emplace(node.id(), true).second) continue;
    for (int i = 0; i < node.operand_count(); ++i) stack.push_back(node.operand(i));
  }
  return static_cast<int>(seen.size());
}

RatioForm as_ratio(const SymExpr& e) {
  const SymExpr one = SymExpr::constant(1.0);
  switch (e.kind()) {
    case SymExpr::Kind::Const:
    case SymExpr::Kind::Beta:
      return {e, one};
    case SymExpr::Kind::Neg: {
      RatioForm r = as_ratio(e.operand(0));
      return {SymExpr::neg(r.numerator), r.denominator};
    }
    case SymExpr::Kind::Add:
    case SymExpr::Kind::Sub: {
      RatioForm a = as_ratio(e.operand(0));
      RatioForm b = as_ratio(e.operand(1));
      const SymExpr left = SymExpr::mul(a.numerator, b.denominator);
      const SymExpr right = SymExpr::mul(b.numerator, a.denominator);
      const SymExpr num = e.kind() == SymExpr::Kind::Add ? SymExpr::add(left, right)
                                                         : SymExpr::sub(left, right);
      return {num, SymExpr::mul(a.denominator, b.denominator)};
    }
    case SymExpr::Kind::Mul: {
      RatioForm a = as_ratio(e.operand(0));
      RatioForm b = as_ratio(e.operand(1));
      return {SymExpr::mul(a.numerator, b.numerator),
              SymExpr::mul(a.denominator, b.denominator)};
    }
    case SymExpr::Kind::Div: {
      RatioForm a = as_ratio(e.operand(0));
      RatioForm b = as_ratio(e.operand(1));
      return {SymExpr::mul(a.numerator, b.denominator),
              SymExpr::mul(a.denominator, b.numerator)};
    }
  }
  return {e, one};
}

}  // namespace semid
