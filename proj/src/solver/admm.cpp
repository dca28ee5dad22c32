// Operator splitting on the homogeneous self-dual embedding
//   Q u = v,  u = (x, y, tau) in R^n x K x R_+,  v = (r, s, kappa) in 0 x K x R_+,
// with Q = [0 G' c; -G 0 h; -c' -h' 0]. Each iteration solves one linear
// system with I + Q (Cholesky of I + G'G, factored once) and projects onto
// the cone.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Cholesky>

#include "solver/presolve.hpp"

namespace emv::detail {

namespace {

constexpr int kCheckEvery = 10;

class Admm {
 public:
  Admm(const ReducedProblem& rp, const SolverConfig& cfg)
      : rp_(rp), cfg_(cfg), m_(rp.G.rows()), n_(rp.G.cols()) {
    chol_.compute(Mat::Identity(n_, n_) + rp.G.transpose() * rp.G);
    Vec gx, gy;
    apply_Minv(rp.c, rp.h, gx, gy);
    g_.resize(n_ + m_);
    g_ << gx, gy;
    hg_ = rp.c.dot(gx) + rp.h.dot(gy);
  }

  ConeResult run();

 private:
  // [I G'; -G I]^{-1} (a, b).
  void apply_Minv(const Vec& a, const Vec& b, Vec& x, Vec& y) const {
    x = chol_.solve(a - rp_.G.transpose() * b);
    y = b + rp_.G * x;
  }

  const ReducedProblem& rp_;
  const SolverConfig& cfg_;
  const Eigen::Index m_, n_;
  Eigen::LLT<Mat> chol_;
  Vec g_;
  double hg_ = 0.0;
};

ConeResult Admm::run() {
  ConeResult res;
  const Mat& G = rp_.G;
  const Vec& c = rp_.c;
  const Vec& h = rp_.h;
  const double alpha = cfg_.admm_relaxation;
  const double feastol = 0.1 * std::min(cfg_.tol_eq, cfg_.tol_psd);
  const double gaptol = 0.1 * cfg_.tol_gap;
  const Eigen::Index N = n_ + m_ + 1;

  Vec u = Vec::Zero(N), v = Vec::Zero(N);
  u[N - 1] = 1.0;
  v[N - 1] = 1.0;
  Vec hvec(n_ + m_);
  hvec << c, h;

  double best_merit = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= cfg_.max_iterations; ++it) {
    const Vec w = u + v;
    Vec mx, my;
    apply_Minv(w.head(n_), w.segment(n_, m_), mx, my);
    Vec mxy(n_ + m_);
    mxy << mx, my;
    const double tau_t = (w[N - 1] + hvec.dot(mxy)) / (1.0 + hg_);
    Vec ut(N);
    ut.head(n_ + m_) = mxy - tau_t * g_;
    ut[N - 1] = tau_t;

    const Vec relaxed = alpha * ut + (1.0 - alpha) * u;
    Vec unew = relaxed - v;
    unew.segment(n_, m_) = project_cone(rp_.cone, unew.segment(n_, m_));
    unew[N - 1] = std::max(unew[N - 1], 0.0);
    v = v - relaxed + unew;
    u = std::move(unew);

    if (it % kCheckEvery != 0 && it != cfg_.max_iterations) continue;
    res.iterations = it;
    const Vec x = u.head(n_), y = u.segment(n_, m_), s = v.segment(n_, m_);
    const double tau = u[N - 1];
    const double cx = c.dot(x), hy = h.dot(y);
    if (tau > 1e-12) {
      const double pres = (G * x + s - h * tau).norm() / (tau * (1.0 + h.norm()));
      const double dres = (G.transpose() * y + c * tau).norm() / (tau * (1.0 + c.norm()));
      const double gap = std::abs(cx + hy) / (tau + std::abs(cx) + std::abs(hy));
      if (cfg_.verbose && it % 1000 == 0)
        std::fprintf(stderr, "admm %6d  pres %.2e  dres %.2e  gap %.2e\n", it, pres, dres, gap);
      const double merit = std::max({pres, dres, gap});
      if (merit < best_merit) {
        best_merit = merit;
        res.x = x / tau;
        res.s = s / tau;
        res.z = y / tau;
      }
      if (pres <= feastol && dres <= feastol && gap <= gaptol) {
        res.status = ConeResult::Status::Optimal;
        res.message = "converged";
        return res;
      }
    }
    if (hy < 0) {
      const double pinf = (G.transpose() * y).norm() / (-hy);
      if (pinf <= feastol) {
        res.status = ConeResult::Status::PrimalInfeasible;
        res.certificate = pinf;
        res.message = "primal infeasibility certificate found";
        if (res.x.size() == 0) res.x = Vec::Zero(n_), res.s = Vec::Zero(m_);
        res.z = y / (-hy);
        return res;
      }
    }
    if (cx < 0) {
      const double dinf = (G * x + s).norm() / (-cx);
      if (dinf <= feastol) {
        res.status = ConeResult::Status::DualInfeasible;
        res.certificate = dinf;
        res.message = "primal problem is unbounded";
        if (res.x.size() == 0) res.x = Vec::Zero(n_), res.s = Vec::Zero(m_), res.z = Vec::Zero(m_);
        return res;
      }
    }
  }
  res.status = ConeResult::Status::NotConverged;
  res.message = "iteration budget exhausted";
  if (res.x.size() == 0) {
    res.x = Vec::Zero(n_);
    res.s = Vec::Zero(m_);
    res.z = Vec::Zero(m_);
  }
  return res;
}

}  // namespace

ConeResult solve_admm(const ReducedProblem& rp, const SolverConfig& cfg) {
  Admm admm(rp, cfg);
  return admm.run();
}

}  // namespace emv::detail
