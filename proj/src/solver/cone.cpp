#include "solver/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "emv/solver.hpp"

namespace emv::detail {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

int ConeSpec::dim() const {
  int d = l;
  for (int n : psd) d += svec_size(n);
  return d;
}

int ConeSpec::degree() const {
  int d = l;
  for (int n : psd) d += n;
  return d;
}

int ConeSpec::offset(std::size_t block) const {
  int o = l;
  for (std::size_t k = 0; k < block; ++k) o += svec_size(psd[k]);
  return o;
}

Mat smat(const Eigen::Ref<const Vec>& v, int n) {
  Mat M(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i, ++k) M(i, j) = M(j, i) = v[k] / kSqrt2;
    M(j, j) = v[k++];
  }
  return M;
}

void svec(const Mat& M, Eigen::Ref<Vec> out) {
  const auto n = M.rows();
  int k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i, ++k) out[k] = 0.5 * (M(i, j) + M(j, i)) * kSqrt2;
    out[k++] = M(j, j);
  }
}

Vec svec(const Mat& M) {
  Vec v(svec_size(static_cast<int>(M.rows())));
  svec(M, v);
  return v;
}

Vec cone_identity(const ConeSpec& K) {
  Vec e = Vec::Zero(K.dim());
  e.head(K.l).setOnes();
  int o = K.l;
  for (int n : K.psd) {
    int k = 0;
    for (int j = 0; j < n; ++j) {
      k += j;
      e[o + k++] = 1.0;
    }
    o += svec_size(n);
  }
  return e;
}

double min_cone_eigenvalue(const ConeSpec& K, const Vec& u) {
  double m = std::numeric_limits<double>::infinity();
  if (K.l > 0) m = u.head(K.l).minCoeff();
  int o = K.l;
  for (int n : K.psd) {
    Eigen::SelfAdjointEigenSolver<Mat> es(smat(u.segment(o, svec_size(n)), n),
                                          Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()[0]);
    o += svec_size(n);
  }
  return m;
}

Vec project_cone(const ConeSpec& K, const Vec& u) {
  Vec out(u.size());
  out.head(K.l) = u.head(K.l).cwiseMax(0.0);
  int o = K.l;
  for (int n : K.psd) {
    svec(project_psd(smat(u.segment(o, svec_size(n)), n)), out.segment(o, svec_size(n)));
    o += svec_size(n);
  }
  return out;
}

}  // namespace emv::detail

namespace emv {

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& S) {
  if (S.rows() != S.cols()) throw std::invalid_argument("project_psd: matrix is not square");
  if (!S.allFinite()) throw std::invalid_argument("project_psd: non-finite entries");
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("project_psd: matrix is not symmetric");
  const Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("project_psd: eigensolver failed");
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd& V = es.eigenvectors();
  Eigen::MatrixXd P = V * clipped.asDiagonal() * V.transpose();
  return 0.5 * (P + P.transpose());
}

}  // namespace emv
