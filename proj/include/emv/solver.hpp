#pragma once

// Conic solver for assembled moment SDPs.
//
// Equalities are eliminated first (z = z0 + N w with N a null-space basis),
// which also turns fully pinned measures into constants. The remaining
// problem  min c'w  s.t.  G w + s = h,  s in R_+^l x PSD  is handed to one
// of two backends sharing the same interface:
//   InteriorPoint  homogeneous self-dual embedding, Nesterov-Todd scaling,
//                  Mehrotra predictor-corrector (default);
//   Admm           homogeneous self-dual operator splitting with
//                  eigenvalue-clipping projections.
// Whatever the backend reports, the final status is re-derived by verify()
// on the original, unscaled problem.

#include <string>

#include <Eigen/Dense>

#include "emv/sdp.hpp"

namespace emv {

enum class Backend { InteriorPoint, Admm };
std::string to_string(Backend b);

struct SolverConfig {
  Backend backend = Backend::InteriorPoint;
  /// Budget for the splitting backend.
  int max_iterations = 200000;
  /// Budget for the interior-point backend.
  int max_ipm_iterations = 200;
  double tol_eq = 1e-7;
  double tol_psd = 1e-7;
  double tol_gap = 1e-6;
  /// Over-relaxation of the splitting backend, in (0, 2).
  double admm_relaxation = 1.5;
  /// Ruiz equilibration passes before iterating.
  int scaling_passes = 10;
  /// Only recorded; both backends are deterministic.
  unsigned seed = 0;
  bool verbose = false;

  void validate() const;
};

SdpSolution solve(const SdpProblem& p, const SolverConfig& cfg = {});

/// Recomputes every residual of `s` against `p` from scratch.
Residuals verify(const SdpProblem& p, const SdpSolution& s);

/// Frobenius-nearest PSD matrix: eigenvalues clipped at zero.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& S);

}  // namespace emv
