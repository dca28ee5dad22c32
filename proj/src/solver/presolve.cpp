#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "solver/presolve.hpp"

namespace emv::detail {

namespace {

const double kSqrt2 = std::sqrt(2.0);

// Rows of a reduced block whose magnitude is below this, relative to the
// largest coefficient of the original block, count as constant.
constexpr double kConstantTol = 1e-11;

struct EqualitySystem {
  Vec z0;
  Mat N;
  bool consistent = true;
  double residual = 0.0;
};

EqualitySystem eliminate(const SdpProblem& p, double tol_eq) {
  const auto n = static_cast<Eigen::Index>(p.num_vars);
  EqualitySystem out;
  std::vector<const LinearRow*> rows;
  for (const auto& r : p.equalities) {
    double scale = 0.0;
    for (const auto& t : r.terms) scale = std::max(scale, std::abs(t.coef));
    if (scale == 0.0) {
      if (std::abs(r.rhs) > tol_eq) {
        out.consistent = false;
        out.residual = std::max(out.residual, std::abs(r.rhs));
      }
      continue;
    }
    rows.push_back(&r);
  }
  if (rows.empty()) {
    out.z0 = Vec::Zero(n);
    out.N = Mat::Identity(n, n);
    return out;
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  Mat A = Mat::Zero(m, n);
  Vec b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double scale = 0.0;
    for (const auto& t : rows[i]->terms) scale = std::max(scale, std::abs(t.coef));
    for (const auto& t : rows[i]->terms) A(i, static_cast<Eigen::Index>(t.index)) += t.coef / scale;
    b[i] = rows[i]->rhs / scale;
  }
  // Column-pivoted QR of A': the first `rank` columns of Q span the row
  // space of A, the remaining ones its null space.
  Eigen::ColPivHouseholderQR<Mat> qr(A.transpose());
  qr.setThreshold(1e-10 * static_cast<double>(std::max(m, n)));
  const Eigen::Index rank = qr.rank();
  const Mat Q = qr.householderQ();
  // A z0 = b with z0 = Q1 u:  P R1' u = b  on the leading rank rows.
  const Mat R1 = qr.matrixR().topLeftCorner(rank, rank).template triangularView<Eigen::Upper>();
  const Vec pb = qr.colsPermutation().transpose() * b;
  const Vec u = R1.transpose().triangularView<Eigen::Lower>().solve(pb.head(rank));
  out.z0 = Q.leftCols(rank) * u;
  out.N = Q.rightCols(n - rank);
  out.residual = std::max(out.residual, (A * out.z0 - b).cwiseAbs().maxCoeff());
  if (out.residual > tol_eq) out.consistent = false;
  return out;
}

// Scaled dense map of one packed block: value = constant + rows * z.
void block_rows(const PsdBlock& blk, Eigen::Index nvars, Mat& rows, Vec& constant) {
  const auto p = static_cast<Eigen::Index>(blk.map.packed.size());
  rows = Mat::Zero(p, nvars);
  constant = Vec::Zero(p);
  std::size_t k = 0;
  for (std::size_t j = 0; j < blk.map.size; ++j) {
    for (std::size_t i = 0; i <= j; ++i, ++k) {
      const double s = i == j ? 1.0 : kSqrt2;
      const auto& e = blk.map.packed[k];
      constant[static_cast<Eigen::Index>(k)] = s * e.constant;
      for (const auto& t : e.terms)
        rows(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t.index)) += s * t.coef;
    }
  }
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void equilibrate(ReducedProblem& rp, int passes) {
  const auto m = rp.G.rows();
  const auto n = rp.G.cols();
  rp.row_scale = Vec::Ones(m);
  rp.col_scale = Vec::Ones(n);
  auto safe = [](double v) { return v > 1e-300 ? 1.0 / std::sqrt(v) : 1.0; };
  for (int pass = 0; pass < passes; ++pass) {
    Vec r(m);
    for (int i = 0; i < rp.cone.l; ++i) r[i] = safe(rp.G.row(i).cwiseAbs().maxCoeff());
    int o = rp.cone.l;
    for (int nb : rp.cone.psd) {
      const int len = svec_size(nb);
      r.segment(o, len).setConstant(safe(max_abs(rp.G.middleRows(o, len))));
      o += len;
    }
    rp.G = r.asDiagonal() * rp.G;
    rp.row_scale.array() *= r.array();
    Vec c(n);
    for (Eigen::Index j = 0; j < n; ++j) c[j] = safe(rp.G.col(j).cwiseAbs().maxCoeff());
    rp.G = rp.G * c.asDiagonal();
    rp.col_scale.array() *= c.array();
  }
  rp.h = rp.row_scale.cwiseProduct(rp.h);
  rp.c = rp.col_scale.cwiseProduct(rp.c);
}

}  // namespace

ReducedProblem presolve(const SdpProblem& p, const SolverConfig& cfg) {
  p.validate();
  ReducedProblem rp;
  rp.sense = p.sense == Sense::Minimize ? 1.0 : -1.0;
  const auto nvars = static_cast<Eigen::Index>(p.num_vars);

  EqualitySystem eq = eliminate(p, cfg.tol_eq);
  rp.z0 = eq.z0;
  rp.N = eq.N;
  if (!eq.consistent) {
    rp.infeasible = true;
    rp.certificate = eq.residual;
    rp.message = "equality constraints are inconsistent";
    return rp;
  }
  const auto nred = rp.N.cols();

  Vec cfull = Vec::Zero(nvars);
  for (const auto& t : p.objective) cfull[static_cast<Eigen::Index>(t.index)] += rp.sense * t.coef;
  rp.c = rp.N.transpose() * cfull;

  std::vector<Mat> g_parts;
  std::vector<Vec> h_parts;

  // Inequalities a.z >= b become -(aN) x + s = a z0 - b.
  for (std::size_t i = 0; i < p.inequalities.size(); ++i) {
    const auto& r = p.inequalities[i];
    Vec a = Vec::Zero(nvars);
    double scale = 0.0;
    for (const auto& t : r.terms) {
      a[static_cast<Eigen::Index>(t.index)] += t.coef;
      scale = std::max(scale, std::abs(t.coef));
    }
    Mat row = -(a.transpose() * rp.N);
    const double rhs = a.dot(rp.z0) - r.rhs;
    if (max_abs(row) <= kConstantTol * std::max(scale, 1.0)) {
      if (rhs < -cfg.tol_eq) {
        rp.infeasible = true;
        rp.certificate = std::max(rp.certificate, -rhs);
        rp.message = "an inequality is violated by the equality-determined moments";
      }
      continue;
    }
    g_parts.push_back(std::move(row));
    h_parts.push_back(Vec::Constant(1, rhs));
    rp.lp_rows.push_back(i);
  }
  rp.cone.l = static_cast<int>(rp.lp_rows.size());

  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    Mat rows;
    Vec constant;
    block_rows(p.blocks[k], nvars, rows, constant);
    Mat g = -(rows * rp.N);
    Vec h = constant + rows * rp.z0;
    if (max_abs(g) <= kConstantTol * std::max(max_abs(rows), 1.0)) {
      const double lo = min_cone_eigenvalue(ConeSpec{0, {static_cast<int>(p.blocks[k].map.size)}}, h);
      if (lo < -cfg.tol_psd) {
        rp.infeasible = true;
        rp.certificate = std::max(rp.certificate, -lo);
        rp.message = "block '" + p.blocks[k].label + "' is fixed and not positive semidefinite";
      }
      continue;
    }
    g_parts.push_back(std::move(g));
    h_parts.push_back(std::move(h));
    rp.psd_blocks.push_back(k);
    rp.cone.psd.push_back(static_cast<int>(p.blocks[k].map.size));
  }
  if (rp.infeasible) return rp;

  Eigen::Index m = 0;
  for (const auto& h : h_parts) m += h.size();
  rp.G.resize(m, nred);
  rp.h.resize(m);
  Eigen::Index o = 0;
  for (std::size_t i = 0; i < g_parts.size(); ++i) {
    rp.G.middleRows(o, g_parts[i].rows()) = g_parts[i];
    rp.h.segment(o, h_parts[i].size()) = h_parts[i];
    o += h_parts[i].size();
  }
  equilibrate(rp, cfg.scaling_passes);
  return rp;
}

}  // namespace emv::detail
