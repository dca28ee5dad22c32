#pragma once

// Cone R_+^l x S_+^{n_1} x ... in stacked svec coordinates: the LP part
// first, then each PSD block as its packed upper triangle with off-diagonal
// entries scaled by sqrt(2), so that the Euclidean inner product of two
// svec vectors equals the trace inner product of the matrices.

#include <vector>

#include <Eigen/Dense>

namespace emv::detail {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct ConeSpec {
  int l = 0;
  std::vector<int> psd;

  int dim() const;
  /// l + sum n_k, the degree of the cone.
  int degree() const;
  int offset(std::size_t block) const;
};

inline int svec_size(int n) { return n * (n + 1) / 2; }

Mat smat(const Eigen::Ref<const Vec>& v, int n);
void svec(const Mat& M, Eigen::Ref<Vec> out);
Vec svec(const Mat& M);

/// Identity element: ones on the LP part, identity matrices on PSD blocks.
Vec cone_identity(const ConeSpec& K);

/// Smallest eigenvalue over all blocks; negative means outside the cone.
double min_cone_eigenvalue(const ConeSpec& K, const Vec& u);

/// Euclidean projection onto the cone.
Vec project_cone(const ConeSpec& K, const Vec& u);

}  // namespace emv::detail
