#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "emv/gmp.hpp"
#include "emv/sdp.hpp"
#include "emv/solver.hpp"

using namespace emv;

namespace {

AffineExpr var(std::size_t i, double c = 1.0) { return AffineExpr{0.0, {{i, c}}}; }
AffineExpr constant(double c) { return AffineExpr{c, {}}; }

// min trace(M) s.t. diag(M) = 1, M (3x3) PSD; one variable per packed entry.
SdpProblem unit_diagonal() {
  SdpProblem p;
  p.num_vars = packed_size(3);
  PsdBlock b{"M", {3, {}}};
  for (std::size_t k = 0; k < p.num_vars; ++k) b.map.packed.push_back(var(k));
  p.blocks.push_back(b);
  for (std::size_t i = 0; i < 3; ++i) {
    p.equalities.push_back({{{packed_index(i, i), 1.0}}, 1.0});
    p.objective.push_back({packed_index(i, i), 1.0});
  }
  return p;
}

// min z2 s.t. [[1, z1], [z1, z2]] PSD, z1 = 0.5.
SdpProblem schur_toy() {
  SdpProblem p;
  p.num_vars = 2;
  p.blocks.push_back({"S", {2, {constant(1.0), var(0), var(1)}}});
  p.equalities.push_back({{{0, 1.0}}, 0.5});
  p.objective.push_back({1, 1.0});
  return p;
}

// z0 = 1 and z0 = 2.
SdpProblem contradictory() {
  SdpProblem p;
  p.num_vars = 1;
  p.blocks.push_back({"z", {1, {var(0)}}});
  p.equalities.push_back({{{0, 1.0}}, 1.0});
  p.equalities.push_back({{{0, 1.0}}, 2.0});
  p.objective.push_back({0, 1.0});
  return p;
}

// [[1, z1], [z1, z2]] PSD with z1 = 1, z2 = 0.5: consistent rows, empty cone.
SdpProblem conic_infeasible() {
  SdpProblem p = schur_toy();
  p.equalities = {{{{0, 1.0}}, 1.0}, {{{1, 1.0}}, 0.5}};
  return p;
}

SolverConfig config(Backend b) {
  SolverConfig c;
  c.backend = b;
  return c;
}

Eigen::MatrixXd random_symmetric(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = g(rng);
  return 0.5 * (A + A.transpose());
}

}  // namespace

class ToySdp : public ::testing::TestWithParam<Backend> {};

TEST_P(ToySdp, UnitDiagonalTraceIsThree) {
  const SdpProblem p = unit_diagonal();
  const SdpSolution s = solve(p, config(GetParam()));
  ASSERT_EQ(s.status, SolveStatus::Optimal) << s.message;
  EXPECT_NEAR(s.objective, 3.0, 1e-7);
  const Eigen::MatrixXd M = p.blocks[0].map.evaluate(s.z);
  EXPECT_LE((M - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-7);
}

TEST_P(ToySdp, SchurComplementBound) {
  const SdpSolution s = solve(schur_toy(), config(GetParam()));
  ASSERT_EQ(s.status, SolveStatus::Optimal) << s.message;
  EXPECT_NEAR(s.z[0], 0.5, 1e-7);
  EXPECT_NEAR(s.z[1], 0.25, 1e-7);
  EXPECT_NEAR(s.objective, 0.25, 1e-7);
}

TEST_P(ToySdp, ContradictoryEqualitiesAreInfeasible) {
  const SdpSolution s = solve(contradictory(), config(GetParam()));
  EXPECT_EQ(s.status, SolveStatus::Infeasible);
  EXPECT_GT(s.certificate, 0.0);
}

TEST_P(ToySdp, EmptyConeIsInfeasible) {
  const SdpSolution s = solve(conic_infeasible(), config(GetParam()));
  EXPECT_EQ(s.status, SolveStatus::Infeasible) << s.message;
}

TEST_P(ToySdp, OptimalResultsSurviveIndependentVerification) {
  for (const SdpProblem& p : {unit_diagonal(), schur_toy()}) {
    const SolverConfig cfg = config(GetParam());
    const SdpSolution s = solve(p, cfg);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    // Residuals recomputed here without the library's verify().
    double eq = 0.0;
    for (const auto& r : p.equalities) eq = std::max(eq, std::abs(r.evaluate(s.z) - r.rhs));
    EXPECT_LE(eq, cfg.tol_eq);
    for (const auto& b : p.blocks) {
      const Eigen::MatrixXd M = b.map.evaluate(s.z);
      EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues()[0], -cfg.tol_psd);
    }
    const Residuals v = verify(p, s);
    EXPECT_LE(v.max_equality, cfg.tol_eq);
    EXPECT_LE(v.relative_gap, cfg.tol_gap);
  }
}

TEST_P(ToySdp, DeterministicAcrossRuns) {
  RiemannConfig c;
  c.order = 2;
  const SdpProblem p = assemble(build_gmp(c));
  const SdpSolution a = solve(p, config(GetParam()));
  const SdpSolution b = solve(p, config(GetParam()));
  EXPECT_EQ(a.iterations, b.iterations);
  ASSERT_EQ(a.z.size(), b.z.size());
  for (Eigen::Index i = 0; i < a.z.size(); ++i) EXPECT_EQ(a.z[i], b.z[i]);
}

INSTANTIATE_TEST_SUITE_P(Backends, ToySdp, ::testing::Values(Backend::InteriorPoint, Backend::Admm),
                         [](const auto& info) { return to_string(info.param); });

TEST(Solve, BudgetExhaustionIsNotConverged) {
  RiemannConfig c;
  c.order = 2;
  const SdpProblem p = assemble(build_gmp(c));
  SolverConfig cfg;
  cfg.max_ipm_iterations = 2;
  const SdpSolution s = solve(p, cfg);
  EXPECT_EQ(s.status, SolveStatus::NotConverged);
  EXPECT_EQ(s.z.size(), static_cast<Eigen::Index>(p.num_vars));
  cfg.backend = Backend::Admm;
  cfg.max_iterations = 5;
  EXPECT_EQ(solve(p, cfg).status, SolveStatus::NotConverged);
}

TEST(Solve, MalformedProblemThrows) {
  SdpProblem p = schur_toy();
  p.objective.push_back({9, 1.0});
  EXPECT_THROW(solve(p), std::invalid_argument);
}

TEST(SolverConfig, ValidateRejectsBadTolerances) {
  SolverConfig c;
  c.tol_eq = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.admm_relaxation = 2.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.max_iterations = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Verify, FlagsViolatedCandidate) {
  const SdpProblem p = schur_toy();
  SdpSolution s;
  s.z = Eigen::Vector2d(0.5, 0.0);
  const Residuals r = verify(p, s);
  EXPECT_NEAR(r.min_psd_eigenvalue, (1.0 - std::sqrt(2.0)) / 2.0, 1e-12);  // eigenvalues of [[1,.5],[.5,0]]
  EXPECT_DOUBLE_EQ(r.max_equality, 0.0);
}

TEST(Verify, DimensionMismatchThrows) {
  SdpSolution s;
  s.z = Eigen::VectorXd::Zero(5);
  EXPECT_THROW(verify(schur_toy(), s), std::invalid_argument);
}

TEST(ProjectPsd, Examples) {
  const Eigen::Matrix2d a = (Eigen::Matrix2d() << 1, 0, 0, -2).finished();
  EXPECT_LE((project_psd(a) - (Eigen::Matrix2d() << 1, 0, 0, 0).finished()).norm(), 1e-15);
  const Eigen::Matrix2d b = (Eigen::Matrix2d() << 0, 1, 1, 0).finished();
  EXPECT_LE((project_psd(b) - 0.5 * Eigen::Matrix2d::Ones()).norm(), 1e-15);
  const Eigen::Matrix2d c = (Eigen::Matrix2d() << 2, 1, 1, 2).finished();
  EXPECT_LE((project_psd(c) - c).norm(), 1e-12);
}

TEST(ProjectPsd, RejectsNonFiniteOrNonSymmetricInput) {
  Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
  a(0, 1) = a(1, 0) = NAN;
  EXPECT_THROW(project_psd(a), std::invalid_argument);
  EXPECT_THROW(project_psd((Eigen::Matrix2d() << 1, 2, 0, 1).finished()), std::invalid_argument);
}

TEST(ProjectPsd, IdempotentAndNonExpansiveOnRandomMatrices) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 12;
    const Eigen::MatrixXd A = random_symmetric(rng, n), B = random_symmetric(rng, n);
    const Eigen::MatrixXd PA = project_psd(A), PB = project_psd(B);
    EXPECT_LE((project_psd(PA) - PA).norm(), 1e-12 * std::max(1.0, PA.norm()));
    EXPECT_LE((PA - PB).norm(), (A - B).norm() + 1e-12);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(PA).eigenvalues()[0], -1e-12);
  }
}
