#pragma once

// Generalized moment problem for a Riemann problem of a scalar conservation
// law dy/dt + d f(y)/dx = 0 on [0,T] x [L,R] with values in [y_min, y_max].
//
// Measures live on reduced spaces: the occupation measure "nu" on (t,x,y),
// the time-slice measures "nu0"/"nuT" on (x,y) and the lateral measures
// "nuL"/"nuR" on (t,y). With the Kruzhkov family every base measure m gains
// two lifted companions m+"_p" (support y >= v) and m+"_m" (support y <= v)
// over the same space extended by v; "nu" lifts to "theta_p"/"theta_m".
//
// Every constraint is generated on the ambient space (t,x,y) or (t,x,y,v)
// and restricted to each measure by substituting its fixed coordinate. A
// candidate constraint is kept only if all restricted integrands have total
// degree <= 2d.

#include <optional>
#include <string>
#include <vector>

#include "emv/poly.hpp"

namespace emv {

enum class EntropyFamily { Polynomial, Kruzhkov };
enum class BoundaryImposition { ImposeLeft, ImposeRight, Both, None };
enum class ObjectiveKind { TraceMin, EntropyMax, Linear };
enum class TraceScope { AllMeasures, OccupationOnly };
enum class Sense { Minimize, Maximize };
enum class Relation { Equal, GreaterEqual };
enum class ConstraintKind { Marginal, Pinning, Conservation, Entropy, Lifting };

std::string to_string(EntropyFamily v);
std::string to_string(BoundaryImposition v);
std::string to_string(ObjectiveKind v);
std::string to_string(TraceScope v);
std::string to_string(ConstraintKind v);

struct RiemannConfig {
  double left = 1.0;
  double right = 0.0;
  /// Flux coefficients, f(y) = sum_k flux[k] y^k.
  std::vector<double> flux{0.0, 0.0, 0.25};
  double T = 1.0;
  double L = -0.5;
  double R = 0.5;
  double y_min = 0.0;
  double y_max = 1.0;
  int order = 4;
  EntropyFamily entropy = EntropyFamily::Polynomial;
  int k_max = 4;
  BoundaryImposition boundary = BoundaryImposition::ImposeLeft;
  ObjectiveKind objective = ObjectiveKind::TraceMin;
  TraceScope trace_scope = TraceScope::AllMeasures;

  /// Burgers flux, l = 1, r = 0, trace objective.
  static RiemannConfig shock();
  /// Burgers flux, l = 0, r = 1, entropy objective.
  static RiemannConfig rarefaction();

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// (t,x,y) with the configured bounds.
  VariableSpace base_space() const;
  /// (t,x,y,v) with v ranging over [y_min, y_max].
  VariableSpace lifted_space() const;
  /// f(y) over `space`, which must contain y.
  Polynomial flux_polynomial(const VariableSpace& space) const;
  /// Rankine-Hugoniot speed (f(l) - f(r)) / (l - r); f'(l) when l == r.
  double shock_speed() const;
};

struct FixedVariable {
  std::string name;
  double value = 0.0;
};

struct SemialgebraicSet {
  VariableSpace space;
  /// g_j >= 0; g_0 = 1 is implicit.
  std::vector<Polynomial> inequalities;
};

struct MeasureDecl {
  std::string name;
  /// (t,x,y) or (t,x,y,v) before the fixed coordinate is substituted.
  VariableSpace ambient;
  SemialgebraicSet support;
  std::vector<FixedVariable> fixed;
  /// Base measure this one lifts; empty for base measures.
  std::string lifted_from;
  /// +1 for y >= v, -1 for y <= v, 0 for base measures.
  int orientation = 0;

  const VariableSpace& space() const { return support.space; }
  bool is_lifted() const { return !lifted_from.empty(); }
  /// Substitutes the fixed coordinates of an ambient polynomial.
  Polynomial restrict(const Polynomial& ambient_poly) const;
};

struct MeasureTerm {
  std::string measure;
  Polynomial integrand;
};

struct LinearMomentConstraint {
  std::vector<MeasureTerm> terms;
  Relation relation = Relation::Equal;
  double rhs = 0.0;
  ConstraintKind kind = ConstraintKind::Marginal;

  int degree() const;
};

struct GmpObjective {
  ObjectiveKind kind = ObjectiveKind::TraceMin;
  Sense sense = Sense::Minimize;
  TraceScope trace_scope = TraceScope::AllMeasures;
  /// Linear functional sum_i int h_i d mu_i; unused for TraceMin.
  std::vector<MeasureTerm> terms;
};

struct GmpProblem {
  int order = 1;
  std::vector<MeasureDecl> measures;
  std::vector<LinearMomentConstraint> constraints;
  GmpObjective objective;

  const MeasureDecl& measure(std::string_view name) const;
  std::optional<std::size_t> measure_index(std::string_view name) const;
  std::size_t count(ConstraintKind kind) const;
};

std::vector<MeasureDecl> declare_measures(const RiemannConfig& cfg);

/// (t,x)-marginals of the five base measures pinned to Lebesgue.
std::vector<LinearMomentConstraint> marginal_constraints(const RiemannConfig& cfg);

/// nu0 pinned to the initial datum; nuL and/or nuR to the boundary states.
std::vector<LinearMomentConstraint> pin_boundary(const RiemannConfig& cfg);

/// Weak form of the conservation law against t^a x^b.
std::vector<LinearMomentConstraint> conservation_constraints(const RiemannConfig& cfg);

/// Entropy flux q with q' = f' eta' and q(0) = 0, over `space`.
Polynomial entropy_flux(const RiemannConfig& cfg, const Polynomial& eta);

/// Entropy inequalities for eta_k = y^k, k = 2..k_max, against Handelman
/// products t^a (T-t)^b (x-L)^c (R-x)^e.
std::vector<LinearMomentConstraint> entropy_constraints_polynomial(const RiemannConfig& cfg);

struct KruzhkovConstraints {
  std::vector<LinearMomentConstraint> lifting;
  std::vector<LinearMomentConstraint> entropy;
};

/// Lifting equalities (theta_p + theta_m = base measure x normalized
/// Lebesgue on Y) and the lifted entropy inequalities.
KruzhkovConstraints entropy_constraints_kruzhkov(const RiemannConfig& cfg);

/// Objective for the configured kind. EntropyMax maximizes the negated sum
/// of all entropy left-hand sides, i.e. minimizes the total entropy
/// production, which is what selects the admissible solution.
GmpObjective objective(const RiemannConfig& cfg,
                       const std::vector<LinearMomentConstraint>& entropy_rows);

GmpProblem build_gmp(const RiemannConfig& cfg);

}  // namespace emv
