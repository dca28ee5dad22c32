#include "emv/gmp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace emv {

namespace {

constexpr std::array<const char*, 5> kBaseNames{"nu", "nu0", "nuT", "nuL", "nuR"};

std::string lifted_name(std::string_view base, int orientation) {
  std::string stem = base == "nu" ? "theta" : "theta" + std::string(base.substr(2));
  return stem + (orientation > 0 ? "_p" : "_m");
}

Polynomial box_quadratic(const VariableSpace& space, std::size_t i) {
  const auto& b = space.bounds(i);
  Polynomial w = Polynomial::variable(space, space.name(i));
  return (w - Polynomial::constant(space, b.lo)) * (Polynomial::constant(space, b.hi) - w);
}

void push_box(SemialgebraicSet& set) {
  for (std::size_t i = 0; i < set.space.arity(); ++i)
    set.inequalities.push_back(box_quadratic(set.space, i));
}

// Fixed coordinate of each base measure: nu0 t=0, nuT t=T, nuL x=L, nuR x=R.
std::vector<FixedVariable> fixed_for(std::string_view base, const RiemannConfig& cfg) {
  if (base == "nu0") return {{"t", 0.0}};
  if (base == "nuT") return {{"t", cfg.T}};
  if (base == "nuL") return {{"x", cfg.L}};
  if (base == "nuR") return {{"x", cfg.R}};
  return {};
}

VariableSpace reduce(VariableSpace space, const std::vector<FixedVariable>& fixed) {
  for (const auto& f : fixed) space = space.without(f.name);
  return space;
}

// Collects restricted terms; rejects candidates exceeding the degree budget.
class RowBuilder {
 public:
  RowBuilder(const std::vector<MeasureDecl>& decls, int max_degree)
      : decls_(decls), max_degree_(max_degree) {}

  void add(std::string_view measure, const Polynomial& ambient_poly) {
    const MeasureDecl& m = find(measure);
    Polynomial p = m.restrict(ambient_poly);
    if (p.is_zero()) return;
    if (p.degree() > max_degree_) overflow_ = true;
    for (auto& t : terms_) {
      if (t.measure == m.name) {
        t.integrand += p;
        return;
      }
    }
    terms_.push_back({m.name, std::move(p)});
  }

  // Appends the row if it fits and is non-trivial; resets the builder.
  bool flush(std::vector<LinearMomentConstraint>& out, Relation rel, double rhs,
             ConstraintKind kind) {
    std::erase_if(terms_, [](const MeasureTerm& t) { return t.integrand.is_zero(); });
    const bool keep = !overflow_ && !terms_.empty();
    if (keep) out.push_back({std::move(terms_), rel, rhs, kind});
    terms_.clear();
    overflow_ = false;
    return keep;
  }

 private:
  const MeasureDecl& find(std::string_view name) const {
    for (const auto& d : decls_)
      if (d.name == name) return d;
    throw std::invalid_argument("undeclared measure '" + std::string(name) + "'");
  }

  const std::vector<MeasureDecl>& decls_;
  int max_degree_;
  std::vector<MeasureTerm> terms_;
  bool overflow_ = false;
};

// Product of powers of the linear Handelman factors over `space`.
Polynomial handelman_product(const std::vector<Polynomial>& factors, std::span<const int> powers,
                             const VariableSpace& space) {
  Polynomial p = Polynomial::constant(space, 1.0);
  for (std::size_t i = 0; i < factors.size(); ++i)
    if (powers[i] > 0) p *= factors[i].pow(powers[i]);
  return p;
}

// All exponent tuples of length n with sum <= budget, in graded-lex order.
std::vector<std::vector<int>> tuples_up_to(std::size_t n, int budget) {
  std::vector<std::vector<int>> out;
  for (const auto& e : monomials_up_to(n, budget)) {
    std::vector<int> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = e[i];
    out.push_back(std::move(v));
  }
  return out;
}

void accumulate(std::vector<MeasureTerm>& into, const MeasureTerm& term, double scale) {
  for (auto& t : into) {
    if (t.measure == term.measure) {
      t.integrand += scale * term.integrand;
      return;
    }
  }
  into.push_back({term.measure, scale * term.integrand});
}

}  // namespace

std::string to_string(EntropyFamily v) {
  return v == EntropyFamily::Polynomial ? "polynomial" : "kruzhkov";
}

std::string to_string(BoundaryImposition v) {
  switch (v) {
    case BoundaryImposition::ImposeLeft: return "impose-left";
    case BoundaryImposition::ImposeRight: return "impose-right";
    case BoundaryImposition::Both: return "both";
    case BoundaryImposition::None: return "none";
  }
  return "?";
}

std::string to_string(ObjectiveKind v) {
  switch (v) {
    case ObjectiveKind::TraceMin: return "trace-min";
    case ObjectiveKind::EntropyMax: return "entropy-max";
    case ObjectiveKind::Linear: return "linear";
  }
  return "?";
}

std::string to_string(TraceScope v) { return v == TraceScope::AllMeasures ? "all" : "nu"; }

std::string to_string(ConstraintKind v) {
  switch (v) {
    case ConstraintKind::Marginal: return "marginal";
    case ConstraintKind::Pinning: return "pinning";
    case ConstraintKind::Conservation: return "conservation";
    case ConstraintKind::Entropy: return "entropy";
    case ConstraintKind::Lifting: return "lifting";
  }
  return "?";
}

// ------------------------------------------------------------ RiemannConfig

RiemannConfig RiemannConfig::shock() { return RiemannConfig{}; }

RiemannConfig RiemannConfig::rarefaction() {
  RiemannConfig c;
  c.left = 0.0;
  c.right = 1.0;
  c.objective = ObjectiveKind::EntropyMax;
  return c;
}

void RiemannConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
  };
  for (double v : {left, right, T, L, R, y_min, y_max})
    if (!std::isfinite(v)) fail("config", "non-finite value");
  if (!(T > 0)) fail("T", "must be positive");
  if (!(L < R)) fail("L/R", "need L < R");
  if (!(y_min < y_max)) fail("y_min/y_max", "need y_min < y_max");
  if (y_min > std::min(left, right) || y_max < std::max(left, right))
    fail("y_min/y_max", "must enclose the left and right states");
  if (order < 1) fail("order", "must be >= 1");
  if (flux.empty()) fail("flux", "needs at least one coefficient");
  for (double c : flux)
    if (!std::isfinite(c)) fail("flux", "non-finite coefficient");
  if (entropy == EntropyFamily::Polynomial && k_max < 2) fail("k_max", "must be >= 2");
}

VariableSpace RiemannConfig::base_space() const {
  return VariableSpace({"t", "x", "y"}, {{0.0, T}, {L, R}, {y_min, y_max}});
}

VariableSpace RiemannConfig::lifted_space() const {
  return VariableSpace({"t", "x", "y", "v"}, {{0.0, T}, {L, R}, {y_min, y_max}, {y_min, y_max}});
}

Polynomial RiemannConfig::flux_polynomial(const VariableSpace& space) const {
  return compose_flux(flux, space, "y");
}

double RiemannConfig::shock_speed() const {
  auto f = [&](double y) {
    double s = 0.0;
    for (std::size_t k = flux.size(); k-- > 0;) s = s * y + flux[k];
    return s;
  };
  if (left == right) {
    double s = 0.0;
    for (std::size_t k = flux.size(); k-- > 1;) s = s * left + static_cast<double>(k) * flux[k];
    return s;
  }
  return (f(left) - f(right)) / (left - right);
}

// -------------------------------------------------------------- MeasureDecl

Polynomial MeasureDecl::restrict(const Polynomial& ambient_poly) const {
  if (!(ambient_poly.space() == ambient))
    throw std::invalid_argument("integrand for '" + name + "' is not on its ambient space");
  Polynomial p = ambient_poly;
  for (const auto& f : fixed) p = p.substitute(f.name, f.value);
  return p;
}

int LinearMomentConstraint::degree() const {
  int d = 0;
  for (const auto& t : terms) d = std::max(d, t.integrand.degree());
  return d;
}

const MeasureDecl& GmpProblem::measure(std::string_view name) const {
  if (auto i = measure_index(name)) return measures[*i];
  throw std::invalid_argument("undeclared measure '" + std::string(name) + "'");
}

std::optional<std::size_t> GmpProblem::measure_index(std::string_view name) const {
  for (std::size_t i = 0; i < measures.size(); ++i)
    if (measures[i].name == name) return i;
  return std::nullopt;
}

std::size_t GmpProblem::count(ConstraintKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      constraints.begin(), constraints.end(),
      [kind](const LinearMomentConstraint& c) { return c.kind == kind; }));
}

// ------------------------------------------------------------------ builders

std::vector<MeasureDecl> declare_measures(const RiemannConfig& cfg) {
  cfg.validate();
  std::vector<MeasureDecl> out;
  const VariableSpace base = cfg.base_space();
  for (const char* name : kBaseNames) {
    MeasureDecl m;
    m.name = name;
    m.ambient = base;
    m.fixed = fixed_for(name, cfg);
    m.support.space = reduce(base, m.fixed);
    push_box(m.support);
    out.push_back(std::move(m));
  }
  if (cfg.entropy != EntropyFamily::Kruzhkov) return out;

  const VariableSpace lifted = cfg.lifted_space();
  for (const char* name : kBaseNames) {
    for (int orientation : {+1, -1}) {
      MeasureDecl m;
      m.name = lifted_name(name, orientation);
      m.ambient = lifted;
      m.fixed = fixed_for(name, cfg);
      m.lifted_from = name;
      m.orientation = orientation;
      m.support.space = reduce(lifted, m.fixed);
      push_box(m.support);
      const auto& s = m.support.space;
      Polynomial order = Polynomial::variable(s, "y") - Polynomial::variable(s, "v");
      m.support.inequalities.push_back(static_cast<double>(orientation) * order);
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::vector<LinearMomentConstraint> marginal_constraints(const RiemannConfig& cfg) {
  const auto decls = declare_measures(cfg);
  const int top = 2 * cfg.order;
  const VariableSpace base = cfg.base_space();
  std::vector<LinearMomentConstraint> out;
  RowBuilder row(decls, top);
  for (const char* name : kBaseNames) {
    const MeasureDecl& m = *std::find_if(decls.begin(), decls.end(),
                                         [&](const MeasureDecl& d) { return d.name == name; });
    std::vector<std::string> lebesgue;
    for (const auto& n : m.space().names())
      if (n != "y") lebesgue.push_back(n);
    for (int a = 0; a <= top; ++a) {
      for (int b = 0; a + b <= top; ++b) {
        const Polynomial tx = Polynomial::monomial(base, Exponent{a, b, 0});
        const Polynomial reduced = m.restrict(tx);
        double rhs = 0.0;
        for (const auto& [e, c] : reduced.terms())
          rhs += c * integrate_monomial_box(e, m.space(), lebesgue);
        row.add(name, tx);
        row.flush(out, Relation::Equal, rhs, ConstraintKind::Marginal);
      }
    }
  }
  return out;
}

std::vector<LinearMomentConstraint> pin_boundary(const RiemannConfig& cfg) {
  const auto decls = declare_measures(cfg);
  const int top = 2 * cfg.order;
  const VariableSpace base = cfg.base_space();
  const double split = std::clamp(0.0, cfg.L, cfg.R);
  std::vector<LinearMomentConstraint> out;
  RowBuilder row(decls, top);

  auto pin = [&](const char* name, auto&& value_of_monomial) {
    const MeasureDecl& m = *std::find_if(decls.begin(), decls.end(),
                                         [&](const MeasureDecl& d) { return d.name == name; });
    for (const auto& alpha : monomials_up_to(base, top)) {
      const Polynomial w = Polynomial::monomial(base, alpha);
      const Polynomial reduced = m.restrict(w);
      double rhs = 0.0;
      for (const auto& [e, c] : reduced.terms()) rhs += c * value_of_monomial(e);
      row.add(name, w);
      row.flush(out, Relation::Equal, rhs, ConstraintKind::Pinning);
    }
  };

  // nu0 = dx delta_{y0(x)} on (x,y), y0 = left for x < 0 and right for x > 0.
  pin("nu0", [&](const Exponent& e) {
    return integrate_power(cfg.L, split, e[0]) * std::pow(cfg.left, e[1]) +
           integrate_power(split, cfg.R, e[0]) * std::pow(cfg.right, e[1]);
  });
  const bool left = cfg.boundary == BoundaryImposition::ImposeLeft ||
                    cfg.boundary == BoundaryImposition::Both;
  const bool right = cfg.boundary == BoundaryImposition::ImposeRight ||
                     cfg.boundary == BoundaryImposition::Both;
  // Lateral measures on (t,y): dt delta_state.
  if (left)
    pin("nuL", [&](const Exponent& e) {
      return integrate_power(0.0, cfg.T, e[0]) * std::pow(cfg.left, e[1]);
    });
  if (right)
    pin("nuR", [&](const Exponent& e) {
      return integrate_power(0.0, cfg.T, e[0]) * std::pow(cfg.right, e[1]);
    });
  return out;
}

std::vector<LinearMomentConstraint> conservation_constraints(const RiemannConfig& cfg) {
  const auto decls = declare_measures(cfg);
  const int top = 2 * cfg.order;
  const VariableSpace base = cfg.base_space();
  const Polynomial y = Polynomial::variable(base, "y");
  const Polynomial f = cfg.flux_polynomial(base);
  std::vector<LinearMomentConstraint> out;
  RowBuilder row(decls, top);
  for (int deg = 0; deg <= top + 1; ++deg) {
    for (int a = deg; a >= 0; --a) {
      const Polynomial tx = Polynomial::monomial(base, Exponent{a, deg - a, 0});
      const Polynomial phi1 = tx * y;
      const Polynomial phi2 = tx * f;
      row.add("nu", differentiate(phi1, "t") + differentiate(phi2, "x"));
      row.add("nu0", phi1);
      row.add("nuT", -phi1);
      row.add("nuL", phi2);
      row.add("nuR", -phi2);
      row.flush(out, Relation::Equal, 0.0, ConstraintKind::Conservation);
    }
  }
  return out;
}

Polynomial entropy_flux(const RiemannConfig& cfg, const Polynomial& eta) {
  const Polynomial f = cfg.flux_polynomial(eta.space());
  return antiderivative(differentiate(f, "y") * differentiate(eta, "y"), "y");
}

std::vector<LinearMomentConstraint> entropy_constraints_polynomial(const RiemannConfig& cfg) {
  const auto decls = declare_measures(cfg);
  const int top = 2 * cfg.order;
  const VariableSpace base = cfg.base_space();
  const Polynomial t = Polynomial::variable(base, "t");
  const Polynomial x = Polynomial::variable(base, "x");
  const std::vector<Polynomial> factors{t, Polynomial::constant(base, cfg.T) - t,
                                        x - Polynomial::constant(base, cfg.L),
                                        Polynomial::constant(base, cfg.R) - x};
  const auto tuples = tuples_up_to(factors.size(), top + 1);
  std::vector<LinearMomentConstraint> out;
  RowBuilder row(decls, top);
  for (int k = 2; k <= cfg.k_max; ++k) {
    const Polynomial eta = Polynomial::monomial(base, Exponent{0, 0, k});
    const Polynomial q = entropy_flux(cfg, eta);
    for (const auto& powers : tuples) {
      const Polynomial psi = handelman_product(factors, powers, base);
      row.add("nu", differentiate(psi, "t") * eta + differentiate(psi, "x") * q);
      row.add("nu0", psi * eta);
      row.add("nuT", -(psi * eta));
      row.add("nuL", psi * q);
      row.add("nuR", -(psi * q));
      row.flush(out, Relation::GreaterEqual, 0.0, ConstraintKind::Entropy);
    }
  }
  return out;
}

KruzhkovConstraints entropy_constraints_kruzhkov(const RiemannConfig& cfg) {
  RiemannConfig kcfg = cfg;
  kcfg.entropy = EntropyFamily::Kruzhkov;
  const auto decls = declare_measures(kcfg);
  const int top = 2 * cfg.order;
  const VariableSpace lifted = cfg.lifted_space();
  const VariableSpace base = cfg.base_space();
  const double y_width = cfg.y_max - cfg.y_min;
  KruzhkovConstraints out;
  RowBuilder row(decls, top);

  for (const auto& alpha : monomials_up_to(lifted, top)) {
    const Polynomial w = Polynomial::monomial(lifted, alpha);
    const Polynomial base_part = Polynomial::monomial(base, Exponent{alpha[0], alpha[1], alpha[2]});
    const double v_moment = integrate_power(cfg.y_min, cfg.y_max, alpha[3]) / y_width;
    for (const char* name : kBaseNames) {
      row.add(lifted_name(name, +1), w);
      row.add(lifted_name(name, -1), w);
      row.add(name, -v_moment * base_part);
      row.flush(out.lifting, Relation::Equal, 0.0, ConstraintKind::Lifting);
    }
  }

  const Polynomial t = Polynomial::variable(lifted, "t");
  const Polynomial x = Polynomial::variable(lifted, "x");
  const Polynomial y = Polynomial::variable(lifted, "y");
  const Polynomial v = Polynomial::variable(lifted, "v");
  auto c = [&](double value) { return Polynomial::constant(lifted, value); };
  const std::vector<Polynomial> factors{t, c(cfg.T) - t, x - c(cfg.L), c(cfg.R) - x,
                                        v - c(cfg.y_min), c(cfg.y_max) - v};
  const Polynomial f_y = cfg.flux_polynomial(lifted);
  const Polynomial f_v = compose_flux(cfg.flux, lifted, "v");
  for (const auto& powers : tuples_up_to(factors.size(), top)) {
    const Polynomial psi = handelman_product(factors, powers, lifted);
    for (int s : {+1, -1}) {
      const Polynomial phi1 = static_cast<double>(s) * (psi * (y - v));
      const Polynomial phi2 = static_cast<double>(s) * (psi * (f_y - f_v));
      row.add(lifted_name("nu", s), differentiate(phi1, "t") + differentiate(phi2, "x"));
      row.add(lifted_name("nu0", s), phi1);
      row.add(lifted_name("nuT", s), -phi1);
      row.add(lifted_name("nuL", s), phi2);
      row.add(lifted_name("nuR", s), -phi2);
    }
    row.flush(out.entropy, Relation::GreaterEqual, 0.0, ConstraintKind::Entropy);
  }
  return out;
}

GmpObjective objective(const RiemannConfig& cfg,
                       const std::vector<LinearMomentConstraint>& entropy_rows) {
  GmpObjective obj;
  obj.kind = cfg.objective;
  obj.trace_scope = cfg.trace_scope;
  switch (cfg.objective) {
    case ObjectiveKind::TraceMin:
      obj.sense = Sense::Minimize;
      break;
    case ObjectiveKind::EntropyMax:
      obj.sense = Sense::Maximize;
      for (const auto& row : entropy_rows)
        for (const auto& term : row.terms) accumulate(obj.terms, term, -1.0);
      std::erase_if(obj.terms, [](const MeasureTerm& t) { return t.integrand.is_zero(); });
      break;
    case ObjectiveKind::Linear:
      obj.sense = Sense::Minimize;
      break;
  }
  return obj;
}

GmpProblem build_gmp(const RiemannConfig& cfg) {
  GmpProblem p;
  p.order = cfg.order;
  p.measures = declare_measures(cfg);
  auto append = [&](std::vector<LinearMomentConstraint> rows) {
    for (auto& r : rows) p.constraints.push_back(std::move(r));
  };
  append(marginal_constraints(cfg));
  append(pin_boundary(cfg));
  append(conservation_constraints(cfg));
  std::vector<LinearMomentConstraint> entropy;
  if (cfg.entropy == EntropyFamily::Polynomial) {
    entropy = entropy_constraints_polynomial(cfg);
  } else {
    auto k = entropy_constraints_kruzhkov(cfg);
    append(std::move(k.lifting));
    entropy = std::move(k.entropy);
  }
  p.objective = objective(cfg, entropy);
  append(std::move(entropy));
  return p;
}

}  // namespace emv
