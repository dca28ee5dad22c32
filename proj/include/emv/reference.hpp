#pragma once

// Ground truth for Riemann problems with a convex polynomial flux: the
// entropy solution in closed form, its moments (closed form and adaptive
// quadrature), a first-order Godunov scheme and the L1 contraction check.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emv/extraction.hpp"
#include "emv/gmp.hpp"
#include "emv/sdp.hpp"

namespace emv {

enum class RiemannCase { Shock, Rarefaction, Constant };
std::string to_string(RiemannCase c);

/// Entropy solution of the Riemann problem described by a RiemannConfig.
/// left > right gives a shock at speed (f(l) - f(r)) / (l - r), left < right
/// a rarefaction fan y = (f')^{-1}(x / t).
class AnalyticSolution {
 public:
  explicit AnalyticSolution(const RiemannConfig& cfg);

  RiemannCase kind() const { return kind_; }
  const RiemannConfig& config() const { return cfg_; }
  double shock_speed() const { return speed_; }
  /// max |f'| over Y.
  double lipschitz() const { return lipschitz_; }

  double operator()(double t, double x) const;
  /// x positions in (L, R) where the profile at time t is not smooth.
  std::vector<double> breakpoints(double t) const;

  double flux(double y) const;
  double flux_derivative(double y) const;

 private:
  RiemannConfig cfg_;
  RiemannCase kind_;
  double speed_ = 0.0;
  double lipschitz_ = 0.0;
};

/// int_T int_X t^a x^b y(t,x)^c dx dt by adaptive Gauss-Kronrod quadrature
/// on cells split at the breakpoints. `e` is over (t,x,y).
double oracle_moment(const AnalyticSolution& sol, const Exponent& e, double tol = 1e-10);

/// Same integral in closed form. Requires a quadratic flux for the
/// rarefaction and a shock that stays inside X up to time T.
double closed_form_moment(const AnalyticSolution& sol, const Exponent& e);

/// Moments up to degree 2*order of one declared measure under the entropy
/// solution: nu, the slices nu0/nuT/nuL/nuR and their Kruzhkov lifts.
MomentSequence analytic_moments(const AnalyticSolution& sol, const MeasureDecl& measure, int order);

/// analytic_moments for every measure of `gmp`, stacked in SDP layout.
Eigen::VectorXd analytic_moment_vector(const AnalyticSolution& sol, const GmpProblem& gmp,
                                       const SdpProblem& sdp);

// ---------------------------------------------------------------- Godunov

enum class GodunovBoundary { Inflow, Outflow, Periodic };

struct GodunovConfig {
  double dx = 0.0005;
  /// Relative to max |f'| on Y. Larger values sharpen the discrete shock.
  double cfl = 0.25;
  double T = 1.0;
  double L = -0.5;
  double R = 0.5;
  /// Ghost-cell states for Inflow boundaries.
  double left_value = 1.0;
  double right_value = 0.0;
  GodunovBoundary boundary = GodunovBoundary::Inflow;

  void validate() const;
};

struct GodunovSnapshot {
  double t = 0.0;
  std::vector<double> values;  // cell averages
};

struct GodunovResult {
  std::vector<double> centers;
  std::vector<GodunovSnapshot> snapshots;  // requested times, then the final time
  int steps = 0;
  double dt = 0.0;
  /// sum over steps of dt * (F_left - F_right) at the domain ends.
  double boundary_inflow = 0.0;
  /// Largest relative change of the total mass in one periodic step.
  double max_mass_drift = 0.0;

  const GodunovSnapshot& final_state() const { return snapshots.back(); }
  /// Piecewise-linear interpolation between cell centres, constant beyond.
  double sample(const GodunovSnapshot& s, double x) const;
};

/// Exact Riemann flux for a convex f: min over [ul, ur] when ul <= ur,
/// max over [ur, ul] otherwise.
double godunov_flux(const std::function<double(double)>& f,
                    const std::function<double(double)>& df, double ul, double ur);

/// Explicit first-order update from `initial` cell averages. Throws if the
/// flux is not convex on the range of the data or cfl is outside (0, 1].
GodunovResult godunov_solve(const GodunovConfig& cfg, const RiemannConfig& problem,
                            const std::vector<double>& initial,
                            const std::vector<double>& snapshot_times = {});

/// Cell averages of the Riemann initial datum (jump at x = 0).
std::vector<double> riemann_initial_cells(const GodunovConfig& cfg, const RiemannConfig& problem);

/// CSV with header t,x,y over all snapshots.
void write_godunov_csv(std::ostream& os, const GodunovResult& r);

// ------------------------------------------------------------ contraction

struct ContractionReport {
  /// int_{|x| <= r} |y_hat(T,x) - y(T,x)| dx.
  double lhs = 0.0;
  /// int_{|x| <= r + C T, x in X} |y_hat(0,x) - y0(x)| dx.
  double rhs = 0.0;
  double residual = 0.0;  // lhs - rhs
  /// Max relative mismatch between the supplied moments of degree <= 2 and
  /// the moments of the extracted graph; large values mean the graph does
  /// not represent the measure and lhs/rhs say nothing about it.
  double consistency = 0.0;
  bool violated = false;
};

/// Evaluates the contraction inequality on the graph extracted from `nu`.
/// The window [-r, r] must lie inside X; the initial-time window is clipped
/// to X.
ContractionReport contraction_check(const MomentSequence& nu, const AnalyticSolution& exact,
                                    double T, double r, const ExtractionConfig& ecfg = {},
                                    double tol = 1e-2);

}  // namespace emv
