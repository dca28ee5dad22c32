#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "emv/solver.hpp"
#include "solver/presolve.hpp"

namespace emv {

namespace {

using detail::Mat;
using detail::Vec;

Mat dense_rows(const std::vector<LinearRow>& rows, std::size_t nvars, Vec& rhs) {
  Mat A = Mat::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(nvars));
  rhs.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& t : rows[i].terms)
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t.index)) += t.coef;
    rhs[static_cast<Eigen::Index>(i)] = rows[i].rhs;
  }
  return A;
}

// <B(z) - C, Z> as a linear functional of z, i.e. the adjoint B*(Z).
void add_adjoint(const AffineSymMatrix& map, const Mat& Z, Vec& out) {
  std::size_t k = 0;
  for (std::size_t j = 0; j < map.size; ++j) {
    for (std::size_t i = 0; i <= j; ++i, ++k) {
      const double w = (i == j ? 1.0 : 2.0) *
                       Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      for (const auto& t : map.packed[k].terms) out[static_cast<Eigen::Index>(t.index)] += w * t.coef;
    }
  }
}

double constant_inner(const AffineSymMatrix& map, const Mat& Z) {
  double s = 0.0;
  std::size_t k = 0;
  for (std::size_t j = 0; j < map.size; ++j)
    for (std::size_t i = 0; i <= j; ++i, ++k)
      s += (i == j ? 1.0 : 2.0) * map.packed[k].constant *
           Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return s;
}

Vec objective_vector(const SdpProblem& p) {
  Vec c = Vec::Zero(static_cast<Eigen::Index>(p.num_vars));
  for (const auto& t : p.objective) c[static_cast<Eigen::Index>(t.index)] += t.coef;
  return c;
}

// Equality multipliers by least squares on A'y = c - G'lambda - B*(Z).
Vec equality_multipliers(const SdpProblem& p, const SdpSolution& s) {
  if (p.equalities.empty()) return Vec();
  const double sense = p.sense == Sense::Minimize ? 1.0 : -1.0;
  Vec r = sense * objective_vector(p);
  for (std::size_t i = 0; i < p.inequalities.size(); ++i)
    for (const auto& t : p.inequalities[i].terms)
      r[static_cast<Eigen::Index>(t.index)] -= s.lambda[static_cast<Eigen::Index>(i)] * t.coef;
  Vec bz = Vec::Zero(r.size());
  for (std::size_t k = 0; k < p.blocks.size(); ++k) add_adjoint(p.blocks[k].map, s.Z[k], bz);
  r -= bz;
  Vec b;
  const Mat A = dense_rows(p.equalities, p.num_vars, b);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(A.transpose());
  return cod.solve(r);
}

// Dual objective in the original sense: offset + b'y + b_in'lambda - <C, Z>.
double dual_value(const SdpProblem& p, const SdpSolution& s) {
  double dual = p.objective_offset * (p.sense == Sense::Minimize ? 1.0 : -1.0);
  for (std::size_t i = 0; i < p.equalities.size(); ++i)
    dual += s.y[static_cast<Eigen::Index>(i)] * p.equalities[i].rhs;
  for (std::size_t i = 0; i < p.inequalities.size(); ++i)
    dual += s.lambda[static_cast<Eigen::Index>(i)] * p.inequalities[i].rhs;
  for (std::size_t k = 0; k < p.blocks.size(); ++k) dual -= constant_inner(p.blocks[k].map, s.Z[k]);
  return dual;
}

bool within(const Residuals& r, const SolverConfig& cfg) {
  return r.max_equality <= cfg.tol_eq && r.min_inequality >= -cfg.tol_eq &&
         r.min_psd_eigenvalue >= -cfg.tol_psd && r.relative_gap <= cfg.tol_gap &&
         r.dual_residual <= cfg.tol_gap;
}

}  // namespace

std::string to_string(Backend b) { return b == Backend::InteriorPoint ? "ipm" : "admm"; }

void SolverConfig::validate() const {
  if (!(tol_eq > 0) || !(tol_psd > 0) || !(tol_gap > 0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (max_iterations < 1 || max_ipm_iterations < 1)
    throw std::invalid_argument("solver iteration budgets must be positive");
  if (!(admm_relaxation > 0 && admm_relaxation < 2))
    throw std::invalid_argument("admm relaxation must lie in (0, 2)");
  if (scaling_passes < 0) throw std::invalid_argument("scaling passes must be >= 0");
}

Residuals verify(const SdpProblem& p, const SdpSolution& s) {
  if (static_cast<std::size_t>(s.z.size()) != p.num_vars)
    throw std::invalid_argument("verify: solution length does not match the problem");
  Residuals r;
  for (const auto& row : p.equalities)
    r.max_equality = std::max(r.max_equality, std::abs(row.evaluate(s.z) - row.rhs));
  r.min_inequality = std::numeric_limits<double>::infinity();
  for (const auto& row : p.inequalities)
    r.min_inequality = std::min(r.min_inequality, row.evaluate(s.z) - row.rhs);
  r.min_psd_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& b : p.blocks) {
    Eigen::SelfAdjointEigenSolver<Mat> es(b.map.evaluate(s.z), Eigen::EigenvaluesOnly);
    r.min_psd_eigenvalue = std::min(r.min_psd_eigenvalue, es.eigenvalues()[0]);
  }

  const bool have_dual = static_cast<std::size_t>(s.lambda.size()) == p.inequalities.size() &&
                         s.Z.size() == p.blocks.size() &&
                         static_cast<std::size_t>(s.y.size()) == p.equalities.size();
  if (!have_dual) {
    r.dual_residual = std::numeric_limits<double>::infinity();
    r.relative_gap = std::numeric_limits<double>::infinity();
    return r;
  }
  const double sense = p.sense == Sense::Minimize ? 1.0 : -1.0;
  const Vec c = sense * objective_vector(p);
  Vec res = c;
  for (std::size_t i = 0; i < p.equalities.size(); ++i) {
    const double yi = s.y[static_cast<Eigen::Index>(i)];
    for (const auto& t : p.equalities[i].terms) res[static_cast<Eigen::Index>(t.index)] -= yi * t.coef;
  }
  for (std::size_t i = 0; i < p.inequalities.size(); ++i) {
    const double li = s.lambda[static_cast<Eigen::Index>(i)];
    for (const auto& t : p.inequalities[i].terms) res[static_cast<Eigen::Index>(t.index)] -= li * t.coef;
    // Multipliers must be nonnegative; a negative one counts as a residual.
    r.dual_residual = std::max(r.dual_residual, -li);
  }
  Vec bz = Vec::Zero(c.size());
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    add_adjoint(p.blocks[k].map, s.Z[k], bz);
    Eigen::SelfAdjointEigenSolver<Mat> es(s.Z[k], Eigen::EigenvaluesOnly);
    r.dual_residual = std::max(r.dual_residual, -es.eigenvalues()[0]);
  }
  res -= bz;
  const double cscale = 1.0 + (c.size() ? c.cwiseAbs().maxCoeff() : 0.0);
  r.dual_residual = std::max(r.dual_residual, (res.size() ? res.cwiseAbs().maxCoeff() : 0.0) / cscale);
  const double primal = sense * p.objective_value(s.z);
  const double dual = dual_value(p, s);
  r.relative_gap = std::abs(primal - dual) / (1.0 + std::abs(primal) + std::abs(dual));
  return r;
}

SdpSolution solve(const SdpProblem& p, const SolverConfig& cfg) {
  cfg.validate();
  SdpSolution sol;
  sol.backend = to_string(cfg.backend);
  const detail::ReducedProblem rp = detail::presolve(p, cfg);
  const auto nvars = static_cast<Eigen::Index>(p.num_vars);

  auto finish_primal_only = [&](SolveStatus status, const std::string& msg) {
    sol.status = status;
    sol.message = msg;
    sol.objective = p.objective_value(sol.z);
    sol.residuals = verify(p, sol);
    return sol;
  };

  if (rp.infeasible) {
    sol.z = rp.z0.size() == nvars ? rp.z0 : Vec::Zero(nvars);
    sol.certificate = rp.certificate;
    return finish_primal_only(SolveStatus::Infeasible, "presolve: " + rp.message);
  }

  detail::ConeResult cr;
  if (rp.G.cols() == 0 || rp.G.rows() == 0) {
    // Everything is fixed by the equalities, or nothing constrains x.
    if (rp.G.cols() > 0 && rp.c.norm() > 0) {
      sol.z = rp.z0;
      return finish_primal_only(SolveStatus::NotConverged, "objective is unbounded");
    }
    cr.status = detail::ConeResult::Status::Optimal;
    cr.x = Vec::Zero(rp.G.cols());
    cr.z = Vec::Zero(rp.G.rows());
    cr.message = "determined by equalities";
  } else {
    cr = cfg.backend == Backend::InteriorPoint ? detail::solve_ipm(rp, cfg)
                                               : detail::solve_admm(rp, cfg);
  }
  sol.iterations = cr.iterations;
  sol.z = rp.moments(cr.x);

  if (cr.status == detail::ConeResult::Status::PrimalInfeasible) {
    sol.certificate = cr.certificate;
    return finish_primal_only(SolveStatus::Infeasible, cr.message);
  }
  if (cr.status == detail::ConeResult::Status::DualInfeasible)
    return finish_primal_only(SolveStatus::NotConverged, cr.message);

  // Dual recovery: cone multipliers are E zhat in original block order.
  const Vec zc = rp.row_scale.size() ? Vec(rp.row_scale.cwiseProduct(cr.z)) : Vec();
  sol.lambda = Vec::Zero(static_cast<Eigen::Index>(p.inequalities.size()));
  for (std::size_t i = 0; i < rp.lp_rows.size(); ++i)
    sol.lambda[static_cast<Eigen::Index>(rp.lp_rows[i])] = zc[static_cast<Eigen::Index>(i)];
  sol.Z.clear();
  for (const auto& b : p.blocks) {
    const auto n = static_cast<Eigen::Index>(b.map.size);
    sol.Z.push_back(Mat::Zero(n, n));
  }
  for (std::size_t k = 0; k < rp.psd_blocks.size(); ++k) {
    const int n = rp.cone.psd[k];
    sol.Z[rp.psd_blocks[k]] = detail::smat(zc.segment(rp.cone.offset(k), detail::svec_size(n)), n);
  }
  sol.y = equality_multipliers(p, sol);

  sol.objective = p.objective_value(sol.z);
  sol.residuals = verify(p, sol);
  const double sense = p.sense == Sense::Minimize ? 1.0 : -1.0;
  sol.dual_objective = sol.objective;
  if (std::isfinite(sol.residuals.relative_gap)) sol.dual_objective = sense * dual_value(p, sol);
  const bool ok = within(sol.residuals, cfg);
  sol.status = ok ? SolveStatus::Optimal : SolveStatus::NotConverged;
  sol.message = cr.message;
  if (!ok && cr.status == detail::ConeResult::Status::Optimal)
    sol.message += "; residuals on the original data exceed tolerances";
  return sol;
}

}  // namespace emv
