#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "emv/reference.hpp"

namespace emv {

namespace {

// Cells per unit length for the window integrals. Both integrands are
// piecewise constant in x up to the grid argmin, so midpoints suffice.
constexpr int kCellsPerUnit = 2000;

double window_l1(const ExtractionResult& ex, const AnalyticSolution& exact, double t, double a, double b) {
  if (!(b > a)) return 0.0;
  const int cells = std::max(1, static_cast<int>(std::ceil((b - a) * kCellsPerUnit)));
  const double h = (b - a) / cells;
  double s = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double x = a + h * (i + 0.5);
    s += std::abs(argmin_y(ex, t, x) - exact(t, x));
  }
  return s * h;
}

// Trapezoid weights of a uniform grid.
std::vector<double> trapezoid(const std::vector<double>& g) {
  std::vector<double> w(g.size(), g.size() > 1 ? (g.back() - g.front()) / static_cast<double>(g.size() - 1) : 0.0);
  if (!w.empty()) {
    w.front() *= 0.5;
    w.back() *= 0.5;
  }
  return w;
}

}  // namespace

ContractionReport contraction_check(const MomentSequence& nu, const AnalyticSolution& exact, double T,
                                    double r, const ExtractionConfig& ecfg, double tol) {
  const RiemannConfig& c = exact.config();
  if (r < 0) throw std::invalid_argument("contraction_check: r must be >= 0");
  if (T < 0 || T > c.T) throw std::invalid_argument("contraction_check: T lies outside the time interval");
  if (-r < c.L || r > c.R) throw std::invalid_argument("contraction_check: window exceeds the domain");

  ContractionReport rep;
  const ExtractionResult ex = extract(nu, ecfg);
  rep.lhs = window_l1(ex, exact, T, -r, r);
  const double reach = r + exact.lipschitz() * T;
  rep.rhs = window_l1(ex, exact, 0.0, std::max(-reach, c.L), std::min(reach, c.R));
  rep.residual = rep.lhs - rep.rhs;

  const std::vector<double> wt = trapezoid(ex.t), wx = trapezoid(ex.x);
  for (const Exponent& e : monomials_up_to(3, 2)) {
    double m = 0.0;
    for (std::size_t i = 0; i < ex.t.size(); ++i)
      for (std::size_t j = 0; j < ex.x.size(); ++j)
        m += wt[i] * wx[j] * std::pow(ex.t[i], e[0]) * std::pow(ex.x[j], e[1]) *
             std::pow(ex.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), e[2]);
    rep.consistency = std::max(rep.consistency, std::abs(m - nu[e]) / std::max(1.0, std::abs(nu[e])));
  }
  rep.violated = rep.residual > tol || rep.consistency > tol;
  return rep;
}

}  // namespace emv
