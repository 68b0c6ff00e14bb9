#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "semid/equations.hpp"
#include "semid/errors.hpp"
#include "semid/oracle.hpp"

using namespace semid;

namespace {

CausalDiagram fig2() {
  return build_diagram({"Z", "X", "Y"}, {{"Z", "X"}, {"X", "Y"}}, {{"X", "Y"}});
}

CausalDiagram fig1() {
  return build_diagram({"X", "W", "Z", "Y"},
                       {{"X", "W"}, {"X", "Z"}, {"W", "Y"}, {"Z", "Y"}},
                       {{"X", "Z"}, {"W", "Y"}});
}

}  // namespace

TEST_CASE("expression construction rules") {
  CHECK_THROWS_AS(SymExpr::beta(2, 1, {1}), SemError);
  CHECK_THROWS_AS(SymExpr::beta(2, 2, {}), SemError);
  CHECK_THROWS_AS(SymExpr::div(SymExpr::constant(1.0), SymExpr::constant(0.0)), SemError);

  const SymExpr x = SymExpr::beta(2, 1, {0});
  CHECK(SymExpr::neg(SymExpr::neg(x)).id() == x.id());
  CHECK(SymExpr::add(x, SymExpr::constant(0.0)).id() == x.id());
  CHECK(SymExpr::mul(SymExpr::constant(1.0), x).id() == x.id());
  CHECK(SymExpr::mul(SymExpr::constant(0.0), x).is_literal_zero());
  CHECK(SymExpr::sub(x, SymExpr::neg(x)).kind() == SymExpr::Kind::Add);
}

TEST_CASE("expression rendering") {
  const CausalDiagram d = fig2();
  const int Z = 0, X = 1, Y = 2;
  const SymExpr formula =
      SymExpr::add(SymExpr::beta(Y, X, {Z}),
                   SymExpr::div(SymExpr::beta(Y, Z, {X}), SymExpr::beta(X, Z, {})));
  CHECK(to_string(formula, d) == "b(Y,X|Z) + b(Y,Z|X)/b(X,Z)");
  CHECK(to_string(SymExpr::neg(SymExpr::div(SymExpr::beta(Y, Z, {X}),
                                            SymExpr::beta(X, Z, {}))),
                  d) == "-b(Y,Z|X)/b(X,Z)");
  CHECK(to_string(SymExpr::mul(SymExpr::sub(SymExpr::constant(1.0), SymExpr::beta(X, Z, {})),
                               SymExpr::constant(2.0)),
                  d) == "(1 - b(X,Z))*2");
}

TEST_CASE("expression evaluation") {
  const OracleTrial trial = make_trial(fig2(), 42, 0);
  const Matrix& sigma = trial.sigma.values;
  const int Z = 0, X = 1, Y = 2;

  CHECK(evaluate_scaled(SymExpr::beta(X, Z, {}), sigma).value ==
        doctest::Approx(sigma(1, 0) / sigma(0, 0)).epsilon(1e-12));

  SUBCASE("instrumental ratio recovers the direct effect") {
    Parameterization p{fig2(), Matrix(3, 3), Matrix(3, 3)};
    p.coefficients(1, 0) = 0.8;
    p.coefficients(2, 1) = 0.5;
    p.error_covariance(0, 0) = 1.0;
    p.error_covariance(1, 1) = 1.0 - 0.64;
    p.error_covariance(2, 2) = 1.0 - 0.25 - 2 * 0.5 * 0.3;
    p.error_covariance(1, 2) = p.error_covariance(2, 1) = 0.3;
    const CovarianceMatrix s = implied_covariance(p);
    const SymExpr ratio = SymExpr::div(SymExpr::beta(Y, Z, {}), SymExpr::beta(X, Z, {}));
    CHECK(evaluate(ratio, s) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("nested conditioning agrees with the normal equations") {
    for (uint64_t seed = 0; seed < 30; ++seed) {
      const CausalDiagram d = testing::random_diagram(4 + seed % 4, 555 + seed, 0.4, 0.4);
      const OracleTrial t = make_trial(d, seed, 0);
      const SymExpr atom = SymExpr::beta(d.size() - 1, 0, s_set(d, d.size() - 1, 0));
      CHECK(evaluate(atom, t.sigma) ==
            doctest::Approx(testing::normal_equations_beta(
                                t.sigma.values, d.size() - 1, 0, s_set(d, d.size() - 1, 0)))
                .epsilon(1e-10));
    }
  }
  SUBCASE("division by a vanishing value is reported") {
    // sigma_ZY is zero when b = 0 is not representable; use an edgeless model
    // where every off-diagonal covariance vanishes.
    const CausalDiagram plain = build_diagram({"A", "B"}, {}, {});
    const OracleTrial t = make_trial(plain, 1, 0);
    const SymExpr bad = SymExpr::div(SymExpr::constant(1.0), SymExpr::beta(1, 0, {}));
    CHECK_THROWS_AS(evaluate(bad, t.sigma), SemError);
  }
  SUBCASE("evaluation is invariant under consistent relabeling") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
      const CausalDiagram d = testing::random_diagram(5, 777 + seed, 0.4, 0.4);
      const OracleTrial t = make_trial(d, seed, 0);
      // Reverse the index labels and permute sigma to match.
      const int n = d.size();
      auto perm = [n](int i) { return n - 1 - i; };
      Matrix permuted(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) permuted(perm(i), perm(j)) = t.sigma.values(i, j);
      const std::vector<int> cond = s_set(d, 4, 1);
      std::vector<int> cond_p;
      for (int c : cond) cond_p.push_back(perm(c));
      const SymExpr original = SymExpr::beta(4, 1, cond);
      const SymExpr relabeled = SymExpr::beta(perm(4), perm(1), cond_p);
      CHECK(evaluate_scaled(original, t.sigma.values).value ==
            doctest::Approx(evaluate_scaled(relabeled, permuted).value).epsilon(1e-12));
    }
  }
}

TEST_CASE("ratio form clears divisions without cancellation") {
  const SymExpr a = SymExpr::beta(3, 0, {1, 2});
  const SymExpr b = SymExpr::beta(2, 0, {1});
  const SymExpr c = SymExpr::beta(3, 1, {0, 2});
  const SymExpr expr = SymExpr::sub(a, SymExpr::mul(c, SymExpr::div(a, b)));
  const RatioForm r = as_ratio(expr);
  const OracleTrial t = make_trial(testing::random_diagram(4, 9, 0.6, 0.3), 2, 0);
  const double direct = evaluate(expr, t.sigma);
  const double split = evaluate(r.numerator, t.sigma) / evaluate(r.denominator, t.sigma);
  CHECK(direct == doctest::Approx(split).epsilon(1e-10));
}

TEST_CASE("equation construction") {
  const CausalDiagram d = fig2();
  const int Z = 0, X = 1, Y = 2;

  const PregEquation eq_x = build_equation(d, Y, X);
  CHECK(eq_x.c_term);
  CHECK_FALSE(eq_x.lhs_structurally_zero);
  REQUIRE(eq_x.alpha_terms.size() == 1);
  CHECK(eq_x.alpha_terms.at(X).is_literal(1.0));
  CHECK(to_string(eq_x.lhs, d) == "b(Y,X|Z)");

  const PregEquation eq_z = build_equation(d, Y, Z);
  CHECK_FALSE(eq_z.c_term);
  REQUIRE(eq_z.alpha_terms.size() == 1);
  CHECK(to_string(eq_z.alpha_terms.at(X), d) == "-b(X,Z)");

  SUBCASE("no bidirected edges leaves only the direct coefficient") {
    const CausalDiagram chain =
        build_diagram({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}}, {});
    for (int j = 1; j < 3; ++j)
      for (int k = 0; k < j; ++k) {
        const PregEquation eq = build_equation(chain, j, k);
        CHECK(eq.alpha_terms.empty());
        CHECK(eq.c_term == chain.has_directed(k, j));
      }
  }
}

TEST_CASE("non-parent systems") {
  const CausalDiagram f1 = fig1();
  const int X = 0, W = 1, Z = 2, Y = 3;

  SUBCASE("four-node model, target Y") {
    const EquationSystem sys = build_np_system(f1, Y);
    REQUIRE(sys.equations.size() == 1);
    const PregEquation& eq = sys.equations[0];
    CHECK(eq.name == X);
    CHECK(to_string(eq.lhs, f1) == "b(Y,X|W,Z)");
    REQUIRE(eq.alpha_terms.size() == 1);
    CHECK(to_string(eq.alpha_terms.at(W), f1) == "-b(W,X)");
    CHECK(sys.unknowns == std::vector<int>{W});
  }
  SUBCASE("four-node model, target Z: the W equation is vacuous") {
    // (W) reads b(Z,W|X) = 0 with no unknowns: the left side is structurally
    // zero and no alpha survives, so the system is empty.
    const PregEquation raw = build_equation(f1, Z, W);
    CHECK(raw.lhs_structurally_zero);
    CHECK(raw.alpha_terms.empty());
    CHECK(build_np_system(f1, Z).equations.empty());
  }
  SUBCASE("structurally zero left sides with live unknowns are kept") {
    // V1 -> V2, V2 <-> V4, target V4: equation (V1) has unknown alpha_{4,2}
    // but b(V4,V1|V2,V3) is structurally... the path V1 -> V2 <-> V4 is
    // active given S = {V2, V3}? V2 is a collider in the set, so it is
    // active: left side nonzero. Drop the V1 -> V2 edge to silence it.
    const CausalDiagram d =
        build_diagram({"V1", "V2", "V3", "V4"}, {{"V1", "V3"}, {"V3", "V4"}},
                      {{"V2", "V4"}});
    const EquationSystem sys = build_np_system(d, 3);
    // (V1): b = 0 vacuous; (V2): b(V4,V2|V1,V3) = alpha_{4,2}.
    REQUIRE(sys.equations.size() == 1);
    CHECK(sys.equations[0].name == 1);
  }
  SUBCASE("no bidirected edges means an empty system") {
    const CausalDiagram chain =
        build_diagram({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}}, {});
    CHECK(build_np_system(chain, 2).equations.empty());
  }
}

TEST_CASE("coefficient rewrite") {
  const CausalDiagram f1 = fig1();
  const int X = 0, W = 1, Z = 2, Y = 3;

  SUBCASE("with a solved alpha") {
    std::map<int, SymExpr> sols;
    sols.emplace(W, SymExpr::neg(SymExpr::div(SymExpr::beta(Y, X, {W, Z}),
                                              SymExpr::beta(W, X, {}))));
    const auto c = coefficient_formula(f1, Y, W, sols);
    REQUIRE(c.has_value());
    CHECK(to_string(*c, f1) == "b(Y,W|X,Z) + b(Y,X|W,Z)/b(W,X)");
  }
  SUBCASE("all relevant alphas vanish structurally") {
    const auto dcoef = coefficient_formula(f1, Y, Z, {});
    REQUIRE(dcoef.has_value());
    CHECK(to_string(*dcoef, f1) == "b(Y,Z|X,W)");
  }
  SUBCASE("needed but unsolved alpha leaves the coefficient undecided") {
    CHECK_FALSE(coefficient_formula(f1, Z, X, {}).has_value());
  }
  SUBCASE("non-parents are rejected") {
    CHECK_THROWS_AS(coefficient_formula(f1, Y, X, {}), SemError);
  }
}

TEST_CASE("randomized zero test") {
  const CausalDiagram f1 = fig1();
  const CausalDiagram f2 = fig2();
  CHECK(is_probably_zero(SymExpr::constant(0.0), f2, 4));
  CHECK(is_probably_zero(SymExpr::beta(2, 1, {0}), f1, 8));       // b(Z,W|X)
  CHECK_FALSE(is_probably_zero(SymExpr::beta(1, 0, {}), f2, 8));  // b(X,Z)
  CHECK_THROWS_AS(
      is_probably_zero(SymExpr::div(SymExpr::constant(1.0), SymExpr::beta(1, 0, {})),
                       build_diagram({"A", "B"}, {}, {}), 8),
      SemError);
}

TEST_CASE("system unknowns stay inside the error-correlated set") {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    const CausalDiagram d = testing::random_diagram(2 + seed % 7, 13579 + seed, 0.35, 0.4);
    for (int j = 1; j < d.size(); ++j) {
      const EquationSystem sys = build_np_system(d, j);
      const VariableClassification cls = classify(d, j);
      for (int u : sys.unknowns)
        CHECK(std::count(cls.error_correlated.begin(), cls.error_correlated.end(), u));
      for (const PregEquation& eq : sys.equations) {
        CHECK_FALSE(eq.c_term);
        CHECK(std::count(cls.non_parents.begin(), cls.non_parents.end(), eq.name));
      }
    }
  }
}

TEST_CASE("constructed equations hold numerically") {
  double worst = 0.0;
  for (uint64_t seed = 0; seed < 40; ++seed) {
    const CausalDiagram d = testing::random_diagram(2 + seed % 7, 2468 + seed, 0.4, 0.4);
    const OracleTrial trial = make_trial(d, seed, 0);
    for (int j = 1; j < d.size(); ++j)
      for (int k = 0; k < j; ++k) {
        const PregEquation eq = build_equation(d, j, k);
        const double lhs = evaluate(eq.lhs, trial.sigma);
        double rhs = eq.c_term ? trial.param.coefficients(j, k) : 0.0;
        for (const auto& [i, coeff] : eq.alpha_terms)
          rhs += evaluate(coeff, trial.sigma) * trial.alphas(j, i);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
  }
  CHECK(worst < 1e-8);
}
