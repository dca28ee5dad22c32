#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "emv/reference.hpp"

namespace emv {

namespace {

constexpr int kConvexitySamples = 257;
constexpr int kMaxQuadDepth = 30;

double ipow(double base, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

// Bisection-adaptive Gauss-Kronrod (15-point Kronrod extension of the
// 7-point Gauss rule) with an absolute tolerance split between halves.
// Boost's own adaptive driver uses a relative criterion, which never
// terminates on integrals that cancel to zero.
template <class F>
double integrate_abs(F& f, double a, double b, double tol, int depth) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
  if (err <= tol || depth == 0) return v;
  const double m = 0.5 * (a + b);
  return integrate_abs(f, a, m, 0.5 * tol, depth - 1) + integrate_abs(f, m, b, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(F&& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  return integrate_abs(f, a, b, tol, kMaxQuadDepth);
}

// Integral over [a, b] split at the sorted interior points of `cuts`.
template <class F>
double integrate_pieces(F&& f, double a, double b, std::vector<double> cuts, double tol) {
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0, lo = a;
  for (double c : cuts) {
    if (c <= lo || c >= b) continue;
    s += integrate(f, lo, c, tol);
    lo = c;
  }
  return s + integrate(f, lo, b, tol);
}

}  // namespace

std::string to_string(RiemannCase c) {
  switch (c) {
    case RiemannCase::Shock: return "shock";
    case RiemannCase::Rarefaction: return "rarefaction";
    case RiemannCase::Constant: return "constant";
  }
  return "?";
}

AnalyticSolution::AnalyticSolution(const RiemannConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const double lo = cfg_.y_min, hi = cfg_.y_max;
  for (int i = 0; i < kConvexitySamples; ++i) {
    const double y = lo + (hi - lo) * i / (kConvexitySamples - 1);
    double d2 = 0.0;
    for (std::size_t k = cfg_.flux.size(); k-- > 2;)
      d2 = d2 * y + static_cast<double>(k * (k - 1)) * cfg_.flux[k];
    if (d2 < -1e-12) throw std::invalid_argument("analytic solution requires a convex flux on Y");
  }
  lipschitz_ = std::max(std::abs(flux_derivative(lo)), std::abs(flux_derivative(hi)));
  const bool linear = cfg_.flux.size() <= 2 ||
                      std::all_of(cfg_.flux.begin() + 2, cfg_.flux.end(), [](double c) { return c == 0.0; });
  if (cfg_.left == cfg_.right) {
    kind_ = RiemannCase::Constant;
  } else if (cfg_.left > cfg_.right || linear) {
    kind_ = RiemannCase::Shock;
    speed_ = cfg_.shock_speed();
  } else {
    kind_ = RiemannCase::Rarefaction;
  }
}

double AnalyticSolution::flux(double y) const {
  double s = 0.0;
  for (std::size_t k = cfg_.flux.size(); k-- > 0;) s = s * y + cfg_.flux[k];
  return s;
}

double AnalyticSolution::flux_derivative(double y) const {
  double s = 0.0;
  for (std::size_t k = cfg_.flux.size(); k-- > 1;) s = s * y + static_cast<double>(k) * cfg_.flux[k];
  return s;
}

double AnalyticSolution::operator()(double t, double x) const {
  const double l = cfg_.left, r = cfg_.right;
  switch (kind_) {
    case RiemannCase::Constant: return l;
    case RiemannCase::Shock: return x <= speed_ * t ? l : r;
    case RiemannCase::Rarefaction: break;
  }
  if (t <= 0) return x <= 0 ? l : r;
  const double xi = x / t;
  if (xi <= flux_derivative(l)) return l;
  if (xi >= flux_derivative(r)) return r;
  if (cfg_.flux.size() == 3) return (xi - cfg_.flux[1]) / (2.0 * cfg_.flux[2]);
  // f' is increasing on [l, r]; invert by bisection.
  double a = l, b = r;
  for (int i = 0; i < 200 && b - a > 4 * std::numeric_limits<double>::epsilon(); ++i) {
    const double m = 0.5 * (a + b);
    (flux_derivative(m) < xi ? a : b) = m;
  }
  return 0.5 * (a + b);
}

std::vector<double> AnalyticSolution::breakpoints(double t) const {
  std::vector<double> out;
  auto keep = [&](double x) {
    if (x > cfg_.L && x < cfg_.R) out.push_back(x);
  };
  switch (kind_) {
    case RiemannCase::Constant: break;
    case RiemannCase::Shock: keep(speed_ * t); break;
    case RiemannCase::Rarefaction:
      keep(flux_derivative(cfg_.left) * t);
      keep(flux_derivative(cfg_.right) * t);
      break;
  }
  return out;
}

double oracle_moment(const AnalyticSolution& sol, const Exponent& e, double tol) {
  if (e.arity() != 3) throw std::invalid_argument("oracle_moment: exponent must be over (t,x,y)");
  const RiemannConfig& c = sol.config();
  const int a = e[0], b = e[1], k = e[2];
  auto inner = [&](double t) {
    auto g = [&](double x) { return ipow(x, b) * ipow(sol(t, x), k); };
    return ipow(t, a) * integrate_pieces(g, c.L, c.R, sol.breakpoints(t), tol);
  };
  // Breakpoints cross the lateral boundaries at these times; split there too.
  std::vector<double> tcuts;
  for (double speed : {sol.shock_speed(), sol.flux_derivative(c.left), sol.flux_derivative(c.right)})
    for (double xb : {c.L, c.R})
      if (speed != 0.0 && xb / speed > 0) tcuts.push_back(xb / speed);
  return integrate_pieces(inner, 0.0, c.T, tcuts, tol);
}

double closed_form_moment(const AnalyticSolution& sol, const Exponent& e) {
  if (e.arity() != 3) throw std::invalid_argument("closed_form_moment: exponent must be over (t,x,y)");
  const RiemannConfig& c = sol.config();
  const int a = e[0], b = e[1], k = e[2];
  const double l = c.left, r = c.right, T = c.T, L = c.L, R = c.R;
  const double lk = ipow(l, k), rk = ipow(r, k);
  const double time_a = ipow(T, a + 1) / (a + 1);
  const double time_ab = ipow(T, a + b + 2) / (a + b + 2);
  // Left state on [L, p t], right state on [q t, R]; fan contribution J between.
  auto assemble = [&](double p, double q, double J) {
    return (lk * ipow(p, b + 1) - rk * ipow(q, b + 1)) / (b + 1) * time_ab +
           (ipow(R, b + 1) * rk - ipow(L, b + 1) * lk) / (b + 1) * time_a + J * time_ab;
  };
  auto inside = [&](double speed) {
    const double end = speed * T;
    return end >= L && end <= R;
  };
  switch (sol.kind()) {
    case RiemannCase::Constant: return lk * time_a * integrate_power(L, R, b);
    case RiemannCase::Shock: {
      const double s = sol.shock_speed();
      if (!inside(s)) throw std::domain_error("closed_form_moment: shock leaves the domain before T");
      return assemble(s, s, 0.0);
    }
    case RiemannCase::Rarefaction: break;
  }
  if (c.flux.size() != 3)
    throw std::domain_error("closed_form_moment: rarefaction closed form needs a quadratic flux");
  const double p = sol.flux_derivative(l), q = sol.flux_derivative(r);
  if (!inside(p) || !inside(q)) throw std::domain_error("closed_form_moment: fan leaves the domain before T");
  // J = int_p^q u^b ((u - f1) / (2 f2))^k du, expanded binomially.
  const double f1 = c.flux[1], inv = 1.0 / (2.0 * c.flux[2]);
  double J = 0.0, binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    J += binom * ipow(-f1, k - j) * integrate_power(p, q, b + j);
    binom = binom * (k - j) / (j + 1);
  }
  J *= ipow(inv, k);
  return assemble(p, q, J);
}

MomentSequence analytic_moments(const AnalyticSolution& sol, const MeasureDecl& measure, int order) {
  const RiemannConfig& c = sol.config();
  const VariableSpace& space = measure.space();
  MomentSequence out(measure.name, space, order);
  const double tol = 1e-12;

  double fixed_t = std::numeric_limits<double>::quiet_NaN();
  double fixed_x = std::numeric_limits<double>::quiet_NaN();
  for (const auto& f : measure.fixed) {
    if (f.name == "t") fixed_t = f.value;
    else if (f.name == "x") fixed_x = f.value;
    else throw std::invalid_argument("analytic_moments: unsupported fixed variable " + f.name);
  }
  auto power_of = [&](const Exponent& e, std::string_view name) {
    const auto i = space.index_of(name);
    return i ? e[*i] : 0;
  };

  // Moment of t^a x^b y^k under the base measure.
  auto base = [&](int a, int b, int k) -> double {
    if (std::isnan(fixed_t) && std::isnan(fixed_x)) {
      const Exponent e{a, b, k};
      try {
        return closed_form_moment(sol, e);
      } catch (const std::domain_error&) {
        return oracle_moment(sol, e, 1e-10);
      }
    }
    if (!std::isnan(fixed_t)) {
      auto g = [&](double x) { return ipow(x, b) * ipow(sol(fixed_t, x), k); };
      return integrate_pieces(g, c.L, c.R, sol.breakpoints(fixed_t), tol);
    }
    std::vector<double> cuts;
    for (double speed : {sol.shock_speed(), sol.flux_derivative(c.left), sol.flux_derivative(c.right)})
      if (speed != 0.0 && fixed_x / speed > 0) cuts.push_back(fixed_x / speed);
    auto g = [&](double t) { return ipow(t, a) * ipow(sol(t, fixed_x), k); };
    return integrate_pieces(g, 0.0, c.T, cuts, tol);
  };

  const double width = c.y_max - c.y_min;
  for (std::size_t i = 0; i < out.basis().size(); ++i) {
    const Exponent& e = out.basis()[i];
    const int a = power_of(e, "t"), b = power_of(e, "x"), k = power_of(e, "y");
    double value;
    if (measure.orientation == 0) {
      value = base(a, b, k);
    } else {
      // Integrate v^m against the normalized Lebesgue measure on Y cut at y.
      const int m = power_of(e, "v");
      const double top = base(a, b, k + m + 1), low = base(a, b, k);
      value = measure.orientation > 0 ? top - ipow(c.y_min, m + 1) * low
                                      : ipow(c.y_max, m + 1) * low - top;
      value /= (m + 1) * width;
    }
    out.values()[static_cast<Eigen::Index>(i)] = value;
  }
  return out;
}

Eigen::VectorXd analytic_moment_vector(const AnalyticSolution& sol, const GmpProblem& gmp,
                                       const SdpProblem& sdp) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sdp.num_vars));
  for (const auto& lay : sdp.layout) {
    const MomentSequence m = analytic_moments(sol, gmp.measure(lay.name), sdp.order);
    if (static_cast<std::size_t>(m.values().size()) != lay.length)
      throw std::logic_error("analytic_moment_vector: layout length mismatch for " + lay.name);
    z.segment(static_cast<Eigen::Index>(lay.offset), static_cast<Eigen::Index>(lay.length)) = m.values();
  }
  return z;
}

}  // namespace emv
