// Primal-dual interior-point method on the homogeneous self-dual embedding
//
//   [0]   [ 0   G'  c] [x]        s, z in K,
//   [s] = [-G   0   h] [z]        tau, kappa >= 0,
//   [k]   [-c' -h'  0] [tau]
//
// with Nesterov-Todd scaling W (W z = W^{-T} s = lambda) and a Mehrotra
// predictor-corrector. Complementarity is handled in the scaled space where
// lambda is diagonal, so the Jordan inverse has a closed form.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "solver/presolve.hpp"

namespace emv::detail {

namespace {

constexpr double kStepFraction = 0.99;
constexpr int kStallWindow = 25;

// Any F with M = F F'. Cholesky when it succeeds, otherwise an eigenvalue
// square root with a small positive floor.
Mat sqrt_factor(const Mat& M) {
  Eigen::LLT<Mat> llt(M);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.transpose()));
  const double floor = std::max(1e-300, 1e-30 * std::abs(es.eigenvalues().maxCoeff()));
  Vec r = es.eigenvalues().cwiseMax(floor).cwiseSqrt();
  return es.eigenvectors() * r.asDiagonal();
}

struct BlockScaling {
  Mat R, Rinv;
  Vec lambda;
};

struct Scaling {
  Vec w;       // LP part
  Vec lam_lp;  // LP part of lambda
  std::vector<BlockScaling> blocks;
};

class Ipm {
 public:
  Ipm(const ReducedProblem& rp, const SolverConfig& cfg)
      : rp_(rp), cfg_(cfg), K_(rp.cone), m_(rp.G.rows()), n_(rp.G.cols()) {}

  ConeResult run();

 private:
  // --- cone algebra in stacked svec coordinates -------------------------
  Vec apply_W_invT(const Vec& u) const;  // W^{-T} u
  Vec apply_WT(const Vec& u) const;      // W' u
  Vec apply_W_inv(const Vec& u) const;   // W^{-1} u
  Vec lambda_vec() const;
  Vec lambda_circ(const Vec& u) const;   // lambda o u
  Vec lambda_div(const Vec& u) const;    // lambda \ u
  Vec jordan(const Vec& u, const Vec& v) const;
  double max_step(const Vec& ds, const Vec& dz, double tau, double dtau, double kappa,
                  double dkappa) const;

  void init_scaling(const Vec& s, const Vec& z);
  bool update_scaling(const Vec& s_tilde, const Vec& z_tilde);

  bool factor();
  // Solves [0 G'; G -W'W][dx; dz] = [bx; bz]; also returns W dz.
  void kkt(const Vec& bx, const Vec& bz, Vec& dx, Vec& dz, Vec& wdz) const;
  void kkt_once(const Vec& bx, const Vec& bz, Vec& dx, Vec& wdz) const;

  const ReducedProblem& rp_;
  const SolverConfig& cfg_;
  const ConeSpec& K_;
  const Eigen::Index m_, n_;

  Scaling W_;
  Mat Ghat_;
  Eigen::LLT<Mat> H_;
};

Vec Ipm::apply_W_invT(const Vec& u) const {
  Vec out(m_);
  out.head(K_.l) = u.head(K_.l).cwiseQuotient(W_.w);
  int o = K_.l;
  for (std::size_t k = 0; k < K_.psd.size(); ++k) {
    const int nb = K_.psd[k];
    const auto& b = W_.blocks[k];
    svec(b.Rinv * smat(u.segment(o, svec_size(nb)), nb) * b.Rinv.transpose(),
         out.segment(o, svec_size(nb)));
    o += svec_size(nb);
  }
  return out;
}

Vec Ipm::apply_WT(const Vec& u) const {
  Vec out(m_);
  out.head(K_.l) = W_.w.cwiseProduct(u.head(K_.l));
  int o = K_.l;
  for (std::size_t k = 0; k < K_.psd.size(); ++k) {
    const int nb = K_.psd[k];
    const auto& b = W_.blocks[k];
    svec(b.R * smat(u.segment(o, svec_size(nb)), nb) * b.R.transpose(),
         out.segment(o, svec_size(nb)));
    o += svec_size(nb);
  }
  return out;
}

Vec Ipm::apply_W_inv(const Vec& u) const {
  Vec out(m_);
  out.head(K_.l) = u.head(K_.l).cwiseQuotient(W_.w);
  int o = K_.l;
  for (std::size_t k = 0; k < K_.psd.size(); ++k) {
    const int nb = K_.psd[k];
    const auto& b = W_.blocks[k];
    svec(b.Rinv.transpose() * smat(u.segment(o, svec_size(nb)), nb) * b.Rinv,
         out.segment(o, svec_size(nb)));
    o += svec_size(nb);
  }
  return out;
}

Vec Ipm::lambda_vec() const {
  Vec out = Vec::Zero(m_);
  out.head(K_.l) = W_.lam_lp;
  int o = K_.l;
  for (std::size_t k = 0; k < K_.psd.size(); ++k) {
    const int nb = K_.psd[k];
    svec(Mat(W_.blocks[k].lambda.asDiagonal()), out.segment(o, svec_size(nb)));
    o += svec_size(nb);
  }
  return out;
}

// For diagonal Lambda: (Lambda U + U Lambda) / 2 scales entry (i,j) by
// (l_i + l_j) / 2; the inverse divides by it.
Vec Ipm::lambda_circ(const Vec& u) const {
  Vec out(m_);
  out.head(K_.l) = W_.lam_lp.cwiseProduct(u.head(K_.l));
  int o = K_.l;
  for (std::size_t k = 0; k < K_.psd.size(); ++k) {
    const int nb = K_.psd[k];
    const Vec& l = W_.blocks[k].lambda;
    int idx = o;
    for (int j = 0; j < nb; ++j)
      for (int i = 0; i <= j; ++i, ++idx) out[idx] = 0.5 * (l[i] + l[j]) * u[idx];
    o += svec_size(nb);
  }
  return out;
}

Vec Ipm::lambda_div(const Vec& u) const {
  Vec out(m_);
  out.head(K_.l) = u.head(K_.l).cwiseQuotient(W_.lam_lp);
  int o = K_.l;
  for (std::size_t k = 0; k < K_.psd.size(); ++k) {
    const int nb = K_.psd[k];
    const Vec& l = W_.blocks[k].lambda;
    int idx = o;
    for (int j = 0; j < nb; ++j)
      for (int i = 0; i <= j; ++i, ++idx) out[idx] = 2.0 * u[idx] / (l[i] + l[j]);
    o += svec_size(nb);
  }
  return out;
}

Vec Ipm::jordan(const Vec& u, const Vec& v) const {
  Vec out(m_);
  out.head(K_.l) = u.head(K_.l).cwiseProduct(v.head(K_.l));
  int o = K_.l;
  for (int nb : K_.psd) {
    const int len = svec_size(nb);
    const Mat U = smat(u.segment(o, len), nb);
    const Mat V = smat(v.segment(o, len), nb);
    svec(0.5 * (U * V + V * U), out.segment(o, len));
    o += len;
  }
  return out;
}

// Largest alpha keeping lambda + alpha ds, lambda + alpha dz, tau, kappa
// nonnegative; +inf if unbounded.
double Ipm::max_step(const Vec& ds, const Vec& dz, double tau, double dtau, double kappa,
                     double dkappa) const {
  double a = std::numeric_limits<double>::infinity();
  auto ratio = [&](double base, double d) {
    if (d < 0) a = std::min(a, -base / d);
  };
  ratio(tau, dtau);
  ratio(kappa, dkappa);
  for (int i = 0; i < K_.l; ++i) {
    ratio(W_.lam_lp[i], ds[i]);
    ratio(W_.lam_lp[i], dz[i]);
  }
  int o = K_.l;
  for (std::size_t k = 0; k < K_.psd.size(); ++k) {
    const int nb = K_.psd[k];
    const int len = svec_size(nb);
    const Vec isq = W_.blocks[k].lambda.cwiseSqrt().cwiseInverse();
    for (const Vec* d : {&ds, &dz}) {
      const Mat D = isq.asDiagonal() * smat(d->segment(o, len), nb) * isq.asDiagonal();
      Eigen::SelfAdjointEigenSolver<Mat> es(D, Eigen::EigenvaluesOnly);
      const double lo = es.eigenvalues()[0];
      if (lo < 0) a = std::min(a, -1.0 / lo);
    }
    o += len;
  }
  return a;
}

void Ipm::init_scaling(const Vec& s, const Vec& z) {
  W_.w = (s.head(K_.l).cwiseQuotient(z.head(K_.l))).cwiseSqrt();
  W_.lam_lp = (s.head(K_.l).cwiseProduct(z.head(K_.l))).cwiseSqrt();
  W_.blocks.clear();
  int o = K_.l;
  for (int nb : K_.psd) {
    const int len = svec_size(nb);
    const Mat Ls = sqrt_factor(smat(s.segment(o, len), nb));
    const Mat Lz = sqrt_factor(smat(z.segment(o, len), nb));
    Eigen::JacobiSVD<Mat> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec l = svd.singularValues();
    const Vec isq = l.cwiseSqrt().cwiseInverse();
    BlockScaling b;
    b.R = Ls * svd.matrixV() * isq.asDiagonal();
    b.Rinv = isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
    b.lambda = l;
    W_.blocks.push_back(std::move(b));
    o += len;
  }
}

// s_tilde, z_tilde are the new iterates expressed in the current scaled
// space; the new scaling composes the old one with the NT scaling of the
// pair (s_tilde, z_tilde), which is well conditioned.
bool Ipm::update_scaling(const Vec& s_tilde, const Vec& z_tilde) {
  const Vec s_lp = W_.w.cwiseProduct(s_tilde.head(K_.l));
  const Vec z_lp = z_tilde.head(K_.l).cwiseQuotient(W_.w);
  if (K_.l > 0 && (s_lp.minCoeff() <= 0 || z_lp.minCoeff() <= 0)) return false;
  W_.w = s_lp.cwiseQuotient(z_lp).cwiseSqrt();
  W_.lam_lp = s_lp.cwiseProduct(z_lp).cwiseSqrt();
  int o = K_.l;
  for (std::size_t k = 0; k < K_.psd.size(); ++k) {
    const int nb = K_.psd[k];
    const int len = svec_size(nb);
    const Mat Ls = sqrt_factor(smat(s_tilde.segment(o, len), nb));
    const Mat Lz = sqrt_factor(smat(z_tilde.segment(o, len), nb));
    Eigen::JacobiSVD<Mat> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec l = svd.singularValues();
    if (!(l.minCoeff() > 0) || !l.allFinite()) return false;
    const Vec isq = l.cwiseSqrt().cwiseInverse();
    auto& b = W_.blocks[k];
    b.R = b.R * Ls * svd.matrixV() * isq.asDiagonal();
    b.Rinv = isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose() * b.Rinv;
    b.lambda = l;
    o += len;
  }
  return true;
}

bool Ipm::factor() {
  Ghat_.resize(m_, n_);
  for (Eigen::Index j = 0; j < n_; ++j) Ghat_.col(j) = apply_W_invT(rp_.G.col(j));
  Mat H = Ghat_.transpose() * Ghat_;
  H_.compute(H);
  double reg = 1e-14 * std::max(1.0, H.diagonal().maxCoeff());
  for (int attempt = 0; H_.info() != Eigen::Success && attempt < 8; ++attempt) {
    H_.compute(H + reg * Mat::Identity(n_, n_));
    reg *= 100.0;
  }
  return H_.info() == Eigen::Success;
}

void Ipm::kkt_once(const Vec& bx, const Vec& bz, Vec& dx, Vec& wdz) const {
  const Vec t = apply_W_invT(bz);
  dx = H_.solve(bx + Ghat_.transpose() * t);
  wdz = Ghat_ * dx - t;
}

void Ipm::kkt(const Vec& bx, const Vec& bz, Vec& dx, Vec& dz, Vec& wdz) const {
  kkt_once(bx, bz, dx, wdz);
  dz = apply_W_inv(wdz);
  // One step of iterative refinement on the unreduced system.
  const Vec r1 = bx - rp_.G.transpose() * dz;
  const Vec r2 = bz - (rp_.G * dx - apply_WT(wdz));
  Vec ex, ewdz;
  kkt_once(r1, r2, ex, ewdz);
  dx += ex;
  wdz += ewdz;
  dz = apply_W_inv(wdz);
}

ConeResult Ipm::run() {
  ConeResult res;
  const Vec& c = rp_.c;
  const Vec& h = rp_.h;
  const Mat& G = rp_.G;
  const Vec e = cone_identity(K_);
  const double nu = K_.degree();
  const double resx0 = std::max(1.0, c.norm());
  const double resz0 = std::max(1.0, h.norm());
  const double feastol = 0.1 * std::min(cfg_.tol_eq, cfg_.tol_psd);
  const double gaptol = 0.1 * cfg_.tol_gap;

  // Starting point: least-squares primal and least-norm dual, shifted into
  // the cone interior.
  W_.w = Vec::Ones(K_.l);
  W_.lam_lp = Vec::Ones(K_.l);
  W_.blocks.clear();
  for (int nb : K_.psd) W_.blocks.push_back({Mat::Identity(nb, nb), Mat::Identity(nb, nb), Vec::Ones(nb)});
  if (!factor()) {
    res.message = "normal equations are singular at the starting point";
    return res;
  }
  Vec x = H_.solve(G.transpose() * h);
  Vec s = h - G * x;
  Vec z = G * H_.solve(-c);
  for (Vec* v : {&s, &z}) {
    const double lo = min_cone_eigenvalue(K_, *v);
    if (lo <= 1e-8 * std::max(1.0, v->norm())) *v += (1.0 - lo) * e;
  }
  double tau = 1.0, kappa = 1.0;
  init_scaling(s, z);

  double best_merit = std::numeric_limits<double>::infinity();
  int best_iteration = 0;
  Vec best_x = x / tau, best_s = s / tau, best_z = z / tau;

  for (int it = 0; it <= cfg_.max_ipm_iterations; ++it) {
    res.iterations = it;
    const Vec rx = G.transpose() * z + c * tau;
    const Vec rz = s + G * x - h * tau;
    const double cx = c.dot(x), hz = h.dot(z);
    const double rt = kappa + cx + hz;
    const double gap = s.dot(z);
    const double mu = (gap + tau * kappa) / (nu + 1.0);

    const double pres = rz.norm() / (tau * resz0);
    const double dres = rx.norm() / (tau * resx0);
    const double pcost = cx / tau, dcost = -hz / tau;
    const double relgap = std::abs(gap / (tau * tau)) / (1.0 + std::abs(pcost) + std::abs(dcost));
    if (cfg_.verbose)
      std::fprintf(stderr, "ipm %3d  p %+.8e  d %+.8e  pres %.2e  dres %.2e  gap %.2e  k/t %.2e\n",
                   it, pcost, dcost, pres, dres, relgap, kappa / tau);

    const double merit = std::max({pres, dres, relgap});
    if (merit < best_merit) {
      best_merit = merit;
      best_iteration = it;
      best_x = x / tau;
      best_s = s / tau;
      best_z = z / tau;
    }
    if (pres <= feastol && dres <= feastol && relgap <= gaptol) {
      res.status = ConeResult::Status::Optimal;
      res.message = "converged";
      res.x = best_x = x / tau;
      res.s = s / tau;
      res.z = z / tau;
      return res;
    }
    if (hz < 0) {
      const double pinf = (G.transpose() * z).norm() / (-hz) / resx0;
      if (pinf <= feastol) {
        res.status = ConeResult::Status::PrimalInfeasible;
        res.certificate = pinf;
        res.message = "primal infeasibility certificate found";
        res.x = best_x;
        res.s = best_s;
        res.z = z / (-hz);
        return res;
      }
    }
    if (cx < 0) {
      const double dinf = (G * x + s).norm() / (-cx) / resz0;
      if (dinf <= feastol) {
        res.status = ConeResult::Status::DualInfeasible;
        res.certificate = dinf;
        res.message = "primal problem is unbounded";
        res.x = best_x;
        res.s = best_s;
        res.z = best_z;
        return res;
      }
    }
    if (it == cfg_.max_ipm_iterations) break;
    if (it - best_iteration > kStallWindow) {
      res.message = "no progress in the last " + std::to_string(kStallWindow) + " iterations";
      break;
    }

    if (!factor()) {
      res.message = "normal equations could not be factored";
      break;
    }
    Vec qx, qz, qwz;
    kkt(-c, h, qx, qz, qwz);
    const double qden_base = c.dot(qx) + h.dot(qz);

    const Vec lam = lambda_vec();
    Vec dx, dz, dwz, ds_t;
    double dtau = 0, dkappa = 0;

    // direction for a given target: eta in [0,1] scales residual reduction,
    // rhs_c is the scaled complementarity right-hand side.
    auto direction = [&](double eta, const Vec& rhs_c, double dk) {
      const Vec ds = lambda_div(rhs_c);
      const Vec bx = -eta * rx;
      const Vec bz = -eta * rz - apply_WT(ds);
      const double bt = -eta * rt - dk;
      Vec px, pz, pwz;
      kkt(bx, bz, px, pz, pwz);
      dtau = (bt - c.dot(px) - h.dot(pz)) / (qden_base - kappa / tau);
      dx = px + dtau * qx;
      dz = pz + dtau * qz;
      dwz = pwz + dtau * qwz;
      ds_t = ds - dwz;
      dkappa = dk - (kappa / tau) * dtau;
    };

    // Predictor.
    direction(1.0, -lambda_circ(lam), -kappa);
    const double a_aff = std::min(1.0, max_step(ds_t, dwz, tau, dtau, kappa, dkappa));
    const double sigma = std::pow(1.0 - a_aff, 3);

    // Corrector.
    const Vec corr = jordan(ds_t, dwz);
    const double dk = (-tau * kappa + sigma * mu - dtau * dkappa) / tau;
    direction(1.0 - sigma, -lambda_circ(lam) + sigma * mu * e - corr, dk);
    const double amax = max_step(ds_t, dwz, tau, dtau, kappa, dkappa);
    const double alpha = std::min(1.0, kStepFraction * amax);

    const Vec s_tilde = lam + alpha * ds_t;
    const Vec z_tilde = lam + alpha * dwz;
    s = apply_WT(s_tilde);
    z = apply_W_inv(z_tilde);
    x += alpha * dx;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
    if (!update_scaling(s_tilde, z_tilde)) {
      res.message = "scaling update failed";
      break;
    }
    if (alpha < 1e-12) {
      res.message = "step length stalled";
      break;
    }
  }
  if (res.message.empty()) res.message = "iteration budget exhausted";
  res.status = ConeResult::Status::NotConverged;
  res.x = best_x;
  res.s = best_s;
  res.z = best_z;
  return res;
}

}  // namespace

ConeResult solve_ipm(const ReducedProblem& rp, const SolverConfig& cfg) {
  Ipm ipm(rp, cfg);
  return ipm.run();
}

}  // namespace emv::detail
