#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "emv/poly.hpp"

using namespace emv;

namespace {

VariableSpace txy() { return VariableSpace({"t", "x", "y"}, {{0, 1}, {-0.5, 0.5}, {0, 1}}); }

// Random polynomial with `terms` monomials of degree <= deg.
Polynomial random_poly(const VariableSpace& s, std::mt19937& rng, int deg, int terms) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  const auto basis = monomials_up_to(s, deg);
  std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
  Polynomial p(s);
  for (int i = 0; i < terms; ++i) p.add_term(basis[pick(rng)], coef(rng));
  return p;
}

std::vector<double> random_point(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<double> w(n);
  for (auto& v : w) v = u(rng);
  return w;
}

long long binomial(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(Exponent, DegreeAndEditing) {
  Exponent e{2, 0, 3};
  EXPECT_EQ(e.degree(), 5);
  EXPECT_EQ(e.without(1), (Exponent{2, 3}));
  EXPECT_EQ(e.with_inserted(3, 1), (Exponent{2, 0, 3, 1}));
  EXPECT_EQ((e + Exponent{1, 1, 1}), (Exponent{3, 1, 4}));
  EXPECT_THROW((e + Exponent{1, 1}), std::invalid_argument);
  EXPECT_THROW(e.set(0, -1), std::invalid_argument);
}

TEST(Monomials, TwoVariablesDegreeThreeOrder) {
  const auto m = monomials_up_to(2, 3);
  const std::vector<Exponent> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1},
                                       {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}};
  EXPECT_EQ(m, expected);
}

TEST(Monomials, ThreeVariablesDegreeTwoHasTen) { EXPECT_EQ(monomials_up_to(txy(), 2).size(), 10u); }

TEST(Monomials, DegreeZeroIsConstantOnly) {
  const auto m = monomials_up_to(4, 0);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].degree(), 0);
}

TEST(Monomials, CountMatchesBinomialForSmallSizes) {
  for (int n = 1; n <= 6; ++n)
    for (int d = 0; d <= 8; ++d) {
      const auto m = monomials_up_to(static_cast<std::size_t>(n), d);
      EXPECT_EQ(static_cast<long long>(m.size()), binomial(n + d, d)) << n << " " << d;
      EXPECT_EQ(monomial_count(static_cast<std::size_t>(n), d), m.size());
      EXPECT_EQ(m.front().degree(), 0);
      for (std::size_t i = 1; i < m.size(); ++i) EXPECT_TRUE(GradedLexLess{}(m[i - 1], m[i]));
    }
}

TEST(MonomialBasis, LookupAndOverflow) {
  MonomialBasis b(3, 2);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(b.index(b[i]), i);
  EXPECT_FALSE(b.find(Exponent{3, 0, 0}).has_value());
  EXPECT_THROW(b.index(Exponent{0, 0, 3}), std::out_of_range);
}

TEST(VariableSpace, RejectsBadDeclarations) {
  EXPECT_THROW(VariableSpace({"t", "t"}, {{0, 1}, {0, 1}}), std::invalid_argument);
  EXPECT_THROW(VariableSpace({"t"}, {{1, 0}}), std::invalid_argument);
  EXPECT_THROW(VariableSpace({"t"}, {{0, INFINITY}}), std::invalid_argument);
  EXPECT_THROW(VariableSpace({"t", "x"}, {{0, 1}}), std::invalid_argument);
  EXPECT_THROW(txy().require("v"), std::invalid_argument);
  EXPECT_EQ(txy().without("x").names(), (std::vector<std::string>{"t", "y"}));
}

TEST(Polynomial, NoStoredZerosAndDegree) {
  const auto s = txy();
  Polynomial p = Polynomial::variable(s, "t") * Polynomial::variable(s, "x");
  EXPECT_EQ(p.degree(), 2);
  p -= Polynomial::variable(s, "x") * Polynomial::variable(s, "t");
  EXPECT_TRUE(p.is_zero());
  EXPECT_EQ(p.degree(), 0);
  EXPECT_DOUBLE_EQ(p.evaluate({0.3, 0.2, 0.1}), 0.0);
  Polynomial q(s);
  q.add_term(Exponent{1, 0, 0}, 0.0);
  EXPECT_EQ(q.size(), 0u);
}

TEST(Polynomial, MismatchedSpacesThrow) {
  const auto s = txy();
  const VariableSpace other({"t", "x"}, {{0, 1}, {-0.5, 0.5}});
  EXPECT_THROW(Polynomial::variable(s, "t") + Polynomial::variable(other, "t"), std::invalid_argument);
  EXPECT_THROW(Polynomial::variable(s, "v"), std::invalid_argument);
}

TEST(Polynomial, ArithmeticCommutesWithEvaluation) {
  std::mt19937 rng(7);
  const auto s = txy();
  for (int trial = 0; trial < 200; ++trial) {
    const Polynomial p = random_poly(s, rng, 4, 6), q = random_poly(s, rng, 4, 6);
    const auto w = random_point(rng, 3);
    const double pv = p(w), qv = q(w);
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
    EXPECT_TRUE(close((p * q)(w), pv * qv));
    EXPECT_TRUE(close((p + q)(w), pv + qv));
    EXPECT_TRUE(close((p - q)(w), pv - qv));
    EXPECT_TRUE(close((2.5 * p)(w), 2.5 * pv));
    EXPECT_TRUE(close(p.pow(3)(w), pv * pv * pv));
  }
}

TEST(Differentiate, Examples) {
  const auto s = txy();
  const Polynomial t = Polynomial::variable(s, "t"), x = Polynomial::variable(s, "x"),
                   y = Polynomial::variable(s, "y");
  const Polynomial d1 = differentiate(t * t * x, "t");
  EXPECT_DOUBLE_EQ(d1.coefficient(Exponent{1, 1, 0}), 2.0);
  EXPECT_EQ(d1.size(), 1u);
  EXPECT_TRUE(differentiate(t, "x").is_zero());
  const Polynomial d3 = differentiate(0.25 * y.pow(3), "y");
  EXPECT_DOUBLE_EQ(d3.coefficient(Exponent{0, 0, 2}), 0.75);
  EXPECT_EQ(d3.size(), 1u);
  EXPECT_THROW(differentiate(t, "v"), std::invalid_argument);
}

TEST(Differentiate, LinearAndProductRuleOnRandomPairs) {
  std::mt19937 rng(11);
  const auto s = txy();
  for (int trial = 0; trial < 100; ++trial) {
    const Polynomial p = random_poly(s, rng, 4, 5), q = random_poly(s, rng, 4, 5);
    const auto w = random_point(rng, 3);
    for (const char* v : {"t", "x", "y"}) {
      const double lin = differentiate(3.0 * p - q, v)(w);
      EXPECT_NEAR(lin, 3.0 * differentiate(p, v)(w) - differentiate(q, v)(w), 1e-10);
      const double prod = differentiate(p * q, v)(w);
      EXPECT_NEAR(prod, differentiate(p, v)(w) * q(w) + p(w) * differentiate(q, v)(w),
                  1e-10 * std::max(1.0, std::abs(prod)));
    }
  }
}

TEST(Antiderivative, InvertsDerivativeAndVanishesAtZero) {
  std::mt19937 rng(5);
  const auto s = txy();
  const Polynomial p = random_poly(s, rng, 3, 6);
  const Polynomial P = antiderivative(p, "y");
  const auto w = random_point(rng, 3);
  EXPECT_NEAR(differentiate(P, "y")(w), p(w), 1e-12);
  EXPECT_DOUBLE_EQ(P.evaluate({w[0], w[1], 0.0}), 0.0);
}

TEST(Substitute, ReducesSpace) {
  const auto s = txy();
  const Polynomial p = Polynomial::variable(s, "t") * Polynomial::variable(s, "y") + Polynomial::constant(s, 1);
  const Polynomial r = p.substitute("t", 0.5);
  EXPECT_EQ(r.space().names(), (std::vector<std::string>{"x", "y"}));
  EXPECT_DOUBLE_EQ(r.evaluate({0.1, 0.4}), 1.2);
  EXPECT_TRUE((Polynomial::variable(s, "t") * Polynomial::variable(s, "x")).substitute("t", 0.0).is_zero());
}

TEST(Embed, MatchesVariablesByName) {
  const auto s = txy();
  const VariableSpace ty({"t", "y"}, {{0, 1}, {0, 1}});
  const Polynomial p = Polynomial::variable(ty, "y") * Polynomial::variable(ty, "t");
  const Polynomial e = p.embed(s);
  EXPECT_DOUBLE_EQ(e.evaluate({0.5, 0.9, 0.2}), 0.1);
  EXPECT_THROW(Polynomial::variable(s, "x").embed(ty), std::invalid_argument);
}

TEST(IntegrateMonomialBox, Examples) {
  const VariableSpace tx({"t", "x"}, {{0, 1}, {-0.5, 0.5}});
  const std::vector<std::string> both{"t", "x"};
  EXPECT_DOUBLE_EQ(integrate_monomial_box(Exponent{1, 0}, tx, both), 0.5);
  EXPECT_DOUBLE_EQ(integrate_monomial_box(Exponent{0, 1}, tx, both), 0.0);
  EXPECT_DOUBLE_EQ(integrate_monomial_box(Exponent{0, 2}, tx, both), 1.0 / 12.0);
  const std::vector<std::string> only_t{"t"};
  EXPECT_THROW(integrate_monomial_box(Exponent{0, 1}, tx, only_t), std::invalid_argument);
  const std::vector<std::string> unknown{"v"};
  EXPECT_THROW(integrate_monomial_box(Exponent{0, 0}, tx, unknown), std::invalid_argument);
}

TEST(IntegrateMonomialBox, AgreesWithQuadratureUpToDegreeTwelve) {
  using boost::math::quadrature::gauss_kronrod;
  std::mt19937 rng(3);
  const VariableSpace s({"t", "x", "y"}, {{0, 1.3}, {-0.7, 0.4}, {-1, 2}});
  const std::vector<std::string> all{"t", "x", "y"};
  const auto basis = monomials_up_to(s, 12);
  std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
  for (int trial = 0; trial < 60; ++trial) {
    const Exponent e = basis[pick(rng)];
    double expected = 1.0;
    for (std::size_t i = 0; i < 3; ++i) {
      auto f = [&](double v) { return std::pow(v, e[i]); };
      expected *= gauss_kronrod<double, 31>::integrate(f, s.bounds(i).lo, s.bounds(i).hi, 0, 0);
    }
    EXPECT_NEAR(integrate_monomial_box(e, s, all), expected, 1e-10 * std::max(1.0, std::abs(expected)))
        << e.to_string();
  }
}

TEST(IntegratePower, ClosedForm) {
  EXPECT_DOUBLE_EQ(integrate_power(0, 1, 3), 0.25);
  EXPECT_DOUBLE_EQ(integrate_power(-1, 1, 1), 0.0);
  EXPECT_DOUBLE_EQ(integrate_power(2, 2, 5), 0.0);
}

TEST(ComposeFlux, Examples) {
  const auto s = txy();
  const std::vector<double> burgers{0, 0, 0.25}, constant{3.0}, identity{0, 1};
  const Polynomial f = compose_flux(burgers, s);
  EXPECT_EQ(f.size(), 1u);
  EXPECT_DOUBLE_EQ(f.coefficient(Exponent{0, 0, 2}), 0.25);
  EXPECT_DOUBLE_EQ(compose_flux(constant, s).evaluate({0.1, 0.2, 0.7}), 3.0);
  EXPECT_DOUBLE_EQ(compose_flux(identity, s).evaluate({0.1, 0.2, 0.7}), 0.7);
  EXPECT_THROW(compose_flux(std::vector<double>{}, s), std::invalid_argument);
}
