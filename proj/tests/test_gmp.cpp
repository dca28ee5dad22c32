#include <cmath>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "emv/gmp.hpp"
#include "emv/reference.hpp"
#include "emv/sdp.hpp"

using namespace emv;

namespace {

RiemannConfig with_order(RiemannConfig c, int d) {
  c.order = d;
  return c;
}

const MeasureTerm* term_of(const LinearMomentConstraint& c, const std::string& m) {
  for (const auto& t : c.terms)
    if (t.measure == m) return &t;
  return nullptr;
}

double coef(const LinearMomentConstraint& c, const std::string& m, const Exponent& e) {
  const MeasureTerm* t = term_of(c, m);
  return t ? t->integrand.coefficient(e) : 0.0;
}

long long binomial(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(RiemannConfig, ValidateRejectsInconsistentFields) {
  RiemannConfig c;
  c.y_max = 0.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.order = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.k_max = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.L = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.flux.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_NO_THROW(RiemannConfig::rarefaction().validate());
}

TEST(RiemannConfig, RankineHugoniotSpeed) {
  EXPECT_DOUBLE_EQ(RiemannConfig::shock().shock_speed(), 0.25);
  RiemannConfig c;
  c.left = c.right = 0.6;
  EXPECT_DOUBLE_EQ(c.shock_speed(), 0.3);
}

TEST(DeclareMeasures, CountsPerFamily) {
  RiemannConfig c;
  EXPECT_EQ(declare_measures(c).size(), 5u);
  c.entropy = EntropyFamily::Kruzhkov;
  const auto m = declare_measures(c);
  ASSERT_EQ(m.size(), 15u);
  std::set<std::string> names;
  for (const auto& d : m) {
    names.insert(d.name);
    if (d.is_lifted()) {
      EXPECT_EQ(d.space().names().back(), "v");
      EXPECT_NE(d.orientation, 0);
      EXPECT_EQ(d.support.inequalities.size(), d.space().arity() + 1);  // box + order constraint
    }
    for (const auto& g : d.support.inequalities) EXPECT_LE(g.degree(), 2);
  }
  for (const char* n : {"nu", "nu0", "nuT", "nuL", "nuR", "theta_p", "theta_m", "theta0_p", "thetaR_m"})
    EXPECT_TRUE(names.count(n)) << n;
}

TEST(DeclareMeasures, BoundaryMeasuresLiveOnReducedSpaces) {
  const auto m = declare_measures(RiemannConfig{});
  EXPECT_EQ(m[0].space().names(), (std::vector<std::string>{"t", "x", "y"}));
  for (const auto& d : m) {
    if (d.name == "nu0" || d.name == "nuT") EXPECT_EQ(d.space().names(), (std::vector<std::string>{"x", "y"}));
    if (d.name == "nuL" || d.name == "nuR") EXPECT_EQ(d.space().names(), (std::vector<std::string>{"t", "y"}));
  }
}

TEST(MarginalConstraints, Examples) {
  const auto rows = marginal_constraints(with_order(RiemannConfig{}, 2));
  bool mass = false, first = false, lateral = false;
  for (const auto& r : rows) {
    ASSERT_EQ(r.terms.size(), 1u);
    const auto& t = r.terms[0];
    if (t.measure == "nu" && t.integrand.coefficient(Exponent{0, 0, 0}) == 1.0 && t.integrand.size() == 1) {
      EXPECT_DOUBLE_EQ(r.rhs, 1.0);
      mass = true;
    }
    if (t.measure == "nu" && t.integrand.coefficient(Exponent{1, 0, 0}) == 1.0 && t.integrand.size() == 1) {
      EXPECT_DOUBLE_EQ(r.rhs, 0.5);
      first = true;
    }
    // On nuL, x^1 becomes the constant L = -1/2 times the t-length 1.
    if (t.measure == "nuL" && t.integrand.size() == 1 && t.integrand.coefficient(Exponent{0, 0}) == -0.5) {
      EXPECT_DOUBLE_EQ(r.rhs, -0.5);
      lateral = true;
    }
  }
  EXPECT_TRUE(mass && first && lateral);
}

TEST(MarginalConstraints, CountFormula) {
  // nu, nuT, nuL, nuR keep every t^a x^b with a + b <= 2d; nu0 only a = 0.
  for (int d = 1; d <= 4; ++d)
    EXPECT_EQ(static_cast<long long>(marginal_constraints(with_order(RiemannConfig{}, d)).size()),
              4 * binomial(2 * d + 2, 2) + 2 * d + 1);
}

TEST(PinBoundary, ShockInitialDatum) {
  const auto rows = pin_boundary(with_order(RiemannConfig::shock(), 2));
  int checked = 0;
  for (const auto& r : rows) {
    const auto& t = r.terms[0];
    if (t.measure != "nu0" || t.integrand.size() != 1) continue;
    const auto& [e, c] = *t.integrand.terms().begin();
    if (c != 1.0) continue;
    if (e == Exponent{0, 3}) {
      EXPECT_DOUBLE_EQ(r.rhs, 0.5);
      ++checked;
    }
    if (e == Exponent{1, 1}) {
      EXPECT_DOUBLE_EQ(r.rhs, -0.125);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 2);
}

TEST(PinBoundary, RarefactionLeftStateIsZero) {
  for (const auto& r : pin_boundary(with_order(RiemannConfig::rarefaction(), 2))) {
    const auto& t = r.terms[0];
    if (t.measure != "nuL") continue;
    const auto& [e, c] = *t.integrand.terms().begin();
    if (e[1] >= 1) EXPECT_DOUBLE_EQ(r.rhs, 0.0) << e.to_string();
  }
}

TEST(PinBoundary, ImpositionSelectsMeasures) {
  auto measures_of = [](BoundaryImposition b) {
    RiemannConfig c = with_order(RiemannConfig{}, 1);
    c.boundary = b;
    std::set<std::string> out;
    for (const auto& r : pin_boundary(c)) out.insert(r.terms[0].measure);
    return out;
  };
  EXPECT_EQ(measures_of(BoundaryImposition::ImposeLeft), (std::set<std::string>{"nu0", "nuL"}));
  EXPECT_EQ(measures_of(BoundaryImposition::ImposeRight), (std::set<std::string>{"nu0", "nuR"}));
  EXPECT_EQ(measures_of(BoundaryImposition::Both), (std::set<std::string>{"nu0", "nuL", "nuR"}));
  EXPECT_EQ(measures_of(BoundaryImposition::None), (std::set<std::string>{"nu0"}));
}

TEST(ConservationConstraints, LowOrderRows) {
  const auto rows = conservation_constraints(with_order(RiemannConfig{}, 2));
  // alpha = (0,0): only boundary terms.
  const auto& r0 = rows[0];
  EXPECT_EQ(term_of(r0, "nu"), nullptr);
  EXPECT_DOUBLE_EQ(coef(r0, "nu0", Exponent{0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(coef(r0, "nuT", Exponent{0, 1}), -1.0);
  EXPECT_DOUBLE_EQ(coef(r0, "nuL", Exponent{0, 2}), 0.25);
  EXPECT_DOUBLE_EQ(coef(r0, "nuR", Exponent{0, 2}), -0.25);
  // alpha = (1,0): d/dt (t y) = y on nu; alpha = (0,1): d/dx (x f) = f on nu.
  bool saw_t = false, saw_x = false;
  for (const auto& r : rows) {
    const MeasureTerm* nu = term_of(r, "nu");
    if (!nu || nu->integrand.size() != 1) continue;
    if (nu->integrand.coefficient(Exponent{0, 0, 1}) == 1.0 && term_of(r, "nu0") == nullptr) saw_t = true;
    if (nu->integrand.coefficient(Exponent{0, 0, 2}) == 0.25) saw_x = true;
  }
  EXPECT_TRUE(saw_t);
  EXPECT_TRUE(saw_x);
  for (const auto& r : rows) EXPECT_EQ(r.relation, Relation::Equal);
}

TEST(ConservationConstraints, MassBalanceMatchesRankineHugoniot) {
  // alpha = (0,0) on analytic boundary moments: int y dnuT must equal
  // int y dnu0 + T (f(l) - f(r)).
  const RiemannConfig c = with_order(RiemannConfig::shock(), 2);
  const GmpProblem g = build_gmp(c);
  const AnalyticSolution sol(c);
  const auto row = conservation_constraints(c)[0];
  double lhs = 0.0;
  for (const auto& t : row.terms) lhs += riesz(analytic_moments(sol, g.measure(t.measure), 2), t.integrand);
  EXPECT_NEAR(lhs, 0.0, 1e-10);
}

TEST(EntropyFlux, BurgersClosedForm) {
  const RiemannConfig c;
  const auto s = c.base_space();
  for (int k = 2; k <= 6; ++k) {
    const Polynomial q = entropy_flux(c, Polynomial::variable(s, "y").pow(k));
    ASSERT_EQ(q.size(), 1u);
    EXPECT_NEAR(q.coefficient(Exponent{0, 0, k + 1}), k / (2.0 * (k + 1)), 1e-15);
    // q' = f' eta' checked symbolically.
    const Polynomial lhs = differentiate(q, "y");
    const Polynomial rhs = differentiate(c.flux_polynomial(s), "y") * differentiate(Polynomial::variable(s, "y").pow(k), "y");
    EXPECT_TRUE((lhs - rhs).is_zero());
  }
}

TEST(EntropyConstraints, ConstantTestFunctionIsBoundaryOnly) {
  const auto rows = entropy_constraints_polynomial(with_order(RiemannConfig{}, 2));
  ASSERT_FALSE(rows.empty());
  const auto& r = rows[0];
  EXPECT_EQ(r.relation, Relation::GreaterEqual);
  EXPECT_EQ(term_of(r, "nu"), nullptr);
  EXPECT_DOUBLE_EQ(coef(r, "nu0", Exponent{0, 2}), 1.0);
  EXPECT_DOUBLE_EQ(coef(r, "nuT", Exponent{0, 2}), -1.0);
  EXPECT_DOUBLE_EQ(coef(r, "nuL", Exponent{0, 3}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(coef(r, "nuR", Exponent{0, 3}), -1.0 / 3.0);
}

TEST(KruzhkovConstraints, LiftingExamples) {
  RiemannConfig c = with_order(RiemannConfig{}, 1);
  c.entropy = EntropyFamily::Kruzhkov;
  const auto k = entropy_constraints_kruzhkov(c);
  bool mass = false, first_v = false;
  for (const auto& r : k.lifting) {
    EXPECT_EQ(r.relation, Relation::Equal);
    const MeasureTerm* p = term_of(r, "theta_p");
    const MeasureTerm* base = term_of(r, "nu");
    if (!p || !base) continue;
    if (p->integrand.size() == 1 && p->integrand.coefficient(Exponent{0, 0, 0, 0}) == 1.0) {
      EXPECT_DOUBLE_EQ(base->integrand.coefficient(Exponent{0, 0, 0}), -1.0);
      mass = true;
    }
    if (p->integrand.size() == 1 && p->integrand.coefficient(Exponent{0, 0, 0, 1}) == 1.0) {
      EXPECT_DOUBLE_EQ(base->integrand.coefficient(Exponent{0, 0, 0}), -0.5);
      first_v = true;
    }
  }
  EXPECT_TRUE(mass);
  EXPECT_TRUE(first_v);
  ASSERT_FALSE(k.entropy.empty());
  const auto& e0 = k.entropy[0];
  EXPECT_EQ(term_of(e0, "theta_p"), nullptr);  // derivatives of a constant test function vanish
  EXPECT_DOUBLE_EQ(coef(e0, "theta0_p", Exponent{0, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(coef(e0, "theta0_p", Exponent{0, 0, 1}), -1.0);
}

TEST(Objective, DefaultsPerCase) {
  const GmpProblem shock = build_gmp(with_order(RiemannConfig::shock(), 2));
  EXPECT_EQ(shock.objective.kind, ObjectiveKind::TraceMin);
  EXPECT_EQ(shock.objective.sense, Sense::Minimize);
  const GmpProblem rare = build_gmp(with_order(RiemannConfig::rarefaction(), 2));
  EXPECT_EQ(rare.objective.kind, ObjectiveKind::EntropyMax);
  EXPECT_EQ(rare.objective.sense, Sense::Maximize);
  EXPECT_FALSE(rare.objective.terms.empty());
}

TEST(BuildGmp, EveryConstraintFitsTheDegreeBudget) {
  for (auto fam : {EntropyFamily::Polynomial, EntropyFamily::Kruzhkov})
    for (int d = 1; d <= (fam == EntropyFamily::Polynomial ? 4 : 2); ++d) {
      RiemannConfig c = with_order(RiemannConfig{}, d);
      c.entropy = fam;
      const GmpProblem g = build_gmp(c);
      for (const auto& row : g.constraints) {
        EXPECT_LE(row.degree(), 2 * d);
        for (const auto& t : row.terms) {
          ASSERT_TRUE(g.measure_index(t.measure).has_value());
          EXPECT_EQ(t.integrand.space(), g.measure(t.measure).space());
        }
        if (row.relation == Relation::GreaterEqual) EXPECT_EQ(row.kind, ConstraintKind::Entropy);
      }
    }
}

TEST(BuildGmp, GoldenCounts) {
  struct Golden {
    EntropyFamily fam;
    int d, marginal, pinning, conservation, entropy, lifting;
  };
  const Golden table[] = {
      {EntropyFamily::Polynomial, 1, 27, 16, 2, 0, 0},   {EntropyFamily::Polynomial, 2, 65, 50, 9, 15, 0},
      {EntropyFamily::Polynomial, 3, 119, 112, 20, 108, 0}, {EntropyFamily::Polynomial, 4, 189, 210, 35, 388, 0},
      {EntropyFamily::Kruzhkov, 1, 27, 16, 2, 3, 70},    {EntropyFamily::Kruzhkov, 2, 65, 50, 9, 64, 315},
  };
  for (const auto& g : table) {
    for (auto base : {RiemannConfig::shock(), RiemannConfig::rarefaction()}) {
      RiemannConfig c = with_order(base, g.d);
      c.entropy = g.fam;
      const GmpProblem p = build_gmp(c);
      EXPECT_EQ(p.count(ConstraintKind::Marginal), static_cast<std::size_t>(g.marginal));
      EXPECT_EQ(p.count(ConstraintKind::Pinning), static_cast<std::size_t>(g.pinning));
      EXPECT_EQ(p.count(ConstraintKind::Conservation), static_cast<std::size_t>(g.conservation));
      EXPECT_EQ(p.count(ConstraintKind::Entropy), static_cast<std::size_t>(g.entropy));
      EXPECT_EQ(p.count(ConstraintKind::Lifting), static_cast<std::size_t>(g.lifting));
    }
  }
}

TEST(BuildGmp, KmaxControlsEntropyRows) {
  RiemannConfig c = with_order(RiemannConfig{}, 3);
  c.k_max = 2;
  const std::size_t two = build_gmp(c).count(ConstraintKind::Entropy);
  c.k_max = 4;
  EXPECT_LT(two, build_gmp(c).count(ConstraintKind::Entropy));
}

// Oracle feasibility: the entropy solution's moments satisfy every row.
class OracleFeasibility : public ::testing::TestWithParam<std::tuple<int, int, int>> {};

TEST_P(OracleFeasibility, AnalyticMomentsSatisfyEveryRow) {
  const auto [fam, kase, d] = GetParam();
  RiemannConfig c = with_order(kase == 0 ? RiemannConfig::shock() : RiemannConfig::rarefaction(), d);
  c.entropy = fam == 0 ? EntropyFamily::Polynomial : EntropyFamily::Kruzhkov;
  const GmpProblem g = build_gmp(c);
  const AnalyticSolution sol(c);
  for (const auto& row : g.constraints) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += riesz(analytic_moments(sol, g.measure(t.measure), d), t.integrand);
    if (row.relation == Relation::Equal) EXPECT_NEAR(lhs, row.rhs, 1e-8) << to_string(row.kind);
    else EXPECT_GE(lhs - row.rhs, -1e-8) << to_string(row.kind);
  }
}

INSTANTIATE_TEST_SUITE_P(PolynomialFamily, OracleFeasibility,
                         ::testing::Combine(::testing::Values(0), ::testing::Values(0, 1), ::testing::Values(1, 2, 3, 4)));
INSTANTIATE_TEST_SUITE_P(KruzhkovFamily, OracleFeasibility,
                         ::testing::Combine(::testing::Values(1), ::testing::Values(0, 1), ::testing::Values(1, 2)));
