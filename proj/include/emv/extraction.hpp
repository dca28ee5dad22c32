#pragma once

// Recovery of the solution graph y(t,x) from the moment matrix of the
// occupation measure. The eigenvectors of the smallest eigenvalues define
// polynomials that nearly vanish on the support; their sum of squares
// p_sos is minimized over y at every grid point (t_i, x_j).

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "emv/poly.hpp"
#include "emv/sdp.hpp"

namespace emv {

struct ExtractionConfig {
  /// Kernel-energy threshold on the cumulative sum of small eigenvalues.
  double epsilon = 1e-6;
  int n_t = 101;
  int n_x = 101;
  int n_y = 101;
  /// Confidence parameter of the concentration bound.
  double beta = 0.01;

  void validate() const;
};

/// p_sos(w) = sum_{i < r} (P_i . b(w))^2 with b the graded-lex monomial
/// vector of degree `order` over `space`.
struct SpectralPsos {
  VariableSpace space;
  int order = 0;
  std::size_t r = 0;
  /// All eigenvalues, ascending, as returned by the decomposition.
  Eigen::VectorXd eigenvalues;
  /// Orthonormal eigenvectors, column i belongs to eigenvalues[i].
  Eigen::MatrixXd eigenvectors;

  double operator()(std::span<const double> w) const;
  /// Expanded coefficients; zero polynomial when r == 0.
  Polynomial polynomial() const;
  /// Sum of the clipped eigenvalues that entered p_sos.
  double kernel_energy() const;
};

SpectralPsos spectral_psos(const Eigen::MatrixXd& M, const VariableSpace& space, int order,
                           double epsilon);

/// Mass bound level: (sum_{i < r} max(e_i, 0)) / beta.
double concentration_level(const Eigen::VectorXd& eigenvalues, std::size_t r, double beta);

struct ExtractionResult {
  std::vector<double> t, x, y;  // grids
  /// values(i, j) approximates y(t_i, x_j).
  Eigen::MatrixXd values;
  SpectralPsos psos;
  double gamma = 0.0;
};

/// Throws std::runtime_error("measure not concentrated at this order") when
/// r == 0. Ties in the argmin over y go to the smallest grid index.
ExtractionResult extract_grid(const SpectralPsos& psos, const ExtractionConfig& cfg);

/// spectral_psos on the moment matrix of `nu`, then extract_grid.
ExtractionResult extract(const MomentSequence& nu, const ExtractionConfig& cfg);

/// Minimizer of p_sos(t, x, .) over the y grid of `result`.
double argmin_y(const ExtractionResult& result, double t, double x);

/// Shock position on the row nearest to `t`. Stage one finds the first grid
/// cell whose values jump by more than half the range of Y and returns its
/// midpoint; with `refine`, stage two bisects inside that cell, classifying
/// each probe by which side state its argmin is closer to.
std::optional<double> locate_shock(const ExtractionResult& result, double t, bool refine = true);

/// CSV with header t,x,y, one row per grid point.
void write_grid_csv(std::ostream& os, const ExtractionResult& result);

}  // namespace emv
