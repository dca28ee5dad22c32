#pragma once

// Moment relaxation of a GmpProblem at order d as a semidefinite program
// over the stacked truncated moment vectors of all measures.
//
// Packed symmetric storage: entry (i, j) with i <= j of an n x n matrix sits
// at k = i + j (j + 1) / 2, i.e. the upper triangle column by column.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "emv/gmp.hpp"
#include "emv/poly.hpp"

namespace emv {

inline std::size_t packed_index(std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return i + j * (j + 1) / 2;
}
inline std::size_t packed_size(std::size_t n) { return n * (n + 1) / 2; }

/// Truncated moments of one measure, indexed by the graded-lex basis of
/// degree 2d over the measure's space.
class MomentSequence {
 public:
  MomentSequence() = default;
  MomentSequence(std::string name, VariableSpace space, int order);
  MomentSequence(std::string name, VariableSpace space, int order, Eigen::VectorXd values);

  const std::string& name() const { return name_; }
  const VariableSpace& space() const { return space_; }
  int order() const { return order_; }
  const MonomialBasis& basis() const { return basis_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double mass() const { return values_[0]; }

  double operator[](const Exponent& e) const { return values_[basis_.index(e)]; }
  double& operator[](const Exponent& e) { return values_[basis_.index(e)]; }

  /// Numeric moment matrix of order d.
  Eigen::MatrixXd moment_matrix() const;
  Eigen::MatrixXd localizing_matrix(const Polynomial& g) const;

 private:
  std::string name_;
  VariableSpace space_;
  int order_ = 0;
  MonomialBasis basis_;
  Eigen::VectorXd values_;
};

/// Riesz functional sum_alpha p_alpha z_alpha; throws if deg p > 2d.
double riesz(const MomentSequence& z, const Polynomial& p);

struct SparseTerm {
  std::size_t index = 0;
  double coef = 0.0;
};

/// constant + sum coef * var[index].
struct AffineExpr {
  double constant = 0.0;
  std::vector<SparseTerm> terms;

  double evaluate(const Eigen::VectorXd& z) const;
  /// Sorts by index and merges duplicates, dropping exact zeros.
  void normalize();
};

/// Symmetric-matrix-valued affine map stored in packed upper form.
struct AffineSymMatrix {
  std::size_t size = 0;
  std::vector<AffineExpr> packed;

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& z) const;
};

/// Moment matrix M_d of a measure whose moments start at `offset`.
AffineSymMatrix moment_matrix_map(std::size_t arity, int d, std::size_t offset = 0);

/// Localizing matrix M_{d - ceil(deg g / 2)}(g z); throws if that order is negative.
AffineSymMatrix localizing_matrix_map(const Polynomial& g, int d, std::size_t offset = 0);

struct LinearRow {
  std::vector<SparseTerm> terms;
  double rhs = 0.0;

  double evaluate(const Eigen::VectorXd& z) const;
};

struct PsdBlock {
  std::string label;
  AffineSymMatrix map;
};

struct MeasureLayout {
  std::string name;
  VariableSpace space;
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct SdpProblem {
  std::size_t num_vars = 0;
  int order = 0;
  Sense sense = Sense::Minimize;
  std::vector<SparseTerm> objective;
  double objective_offset = 0.0;
  std::vector<LinearRow> equalities;    // row . z == rhs
  std::vector<LinearRow> inequalities;  // row . z >= rhs
  std::vector<PsdBlock> blocks;         // map(z) PSD
  std::vector<MeasureLayout> layout;

  double objective_value(const Eigen::VectorXd& z) const;
  const MeasureLayout& measure(std::string_view name) const;
  /// Throws std::invalid_argument on out-of-range indices or bad block sizes.
  void validate() const;
};

enum class SolveStatus { Optimal, NotConverged, Infeasible };
std::string to_string(SolveStatus s);

struct Residuals {
  double max_equality = 0.0;     // max |a.z - b|
  double min_inequality = 0.0;   // min (g.z - h), +inf without rows
  double min_psd_eigenvalue = 0.0;
  double dual_residual = 0.0;
  double relative_gap = 0.0;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::NotConverged;
  Eigen::VectorXd z;
  double objective = 0.0;
  double dual_objective = 0.0;
  Residuals residuals;
  int iterations = 0;
  std::string backend;
  std::string message;
  /// Size of the infeasibility certificate violation, when Infeasible.
  double certificate = 0.0;
  Eigen::VectorXd y;                 // equality multipliers
  Eigen::VectorXd lambda;            // inequality multipliers, >= 0
  std::vector<Eigen::MatrixXd> Z;    // PSD block multipliers

  MomentSequence moments(const SdpProblem& p, std::string_view measure) const;
};

/// Compiles the GMP: one moment block per measure, one localizing block per
/// support inequality, one linear row per moment constraint.
SdpProblem assemble(const GmpProblem& gmp);

/// Moment vector of every measure from an explicit stacked vector.
std::vector<MomentSequence> split_moments(const SdpProblem& p, const Eigen::VectorXd& z);

/// Plain-text sparse SDP format, see README.
void write_sdp(std::ostream& os, const SdpProblem& p);
SdpProblem read_sdp(std::istream& is);
void write_solution(std::ostream& os, const SdpSolution& s);

}  // namespace emv
