#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "emv/reference.hpp"

namespace emv {

void GodunovConfig::validate() const {
  if (!(dx > 0)) throw std::invalid_argument("godunov: dx must be positive");
  if (!(cfl > 0 && cfl <= 1)) throw std::invalid_argument("godunov: CFL number must lie in (0, 1]");
  if (!(T >= 0)) throw std::invalid_argument("godunov: final time must be >= 0");
  if (!(L < R)) throw std::invalid_argument("godunov: need L < R");
  if (dx > R - L) throw std::invalid_argument("godunov: dx exceeds the domain");
}

double GodunovResult::sample(const GodunovSnapshot& s, double x) const {
  if (x <= centers.front()) return s.values.front();
  if (x >= centers.back()) return s.values.back();
  const auto it = std::upper_bound(centers.begin(), centers.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - centers.begin());
  const double w = (x - centers[j - 1]) / (centers[j] - centers[j - 1]);
  return (1 - w) * s.values[j - 1] + w * s.values[j];
}

double godunov_flux(const std::function<double(double)>& f, const std::function<double(double)>& df,
                    double ul, double ur) {
  if (ul > ur) return std::max(f(ul), f(ur));
  if (df(ul) >= 0) return f(ul);
  if (df(ur) <= 0) return f(ur);
  // Interior minimum of a convex f: f' changes sign in (ul, ur).
  double a = ul, b = ur;
  for (int i = 0; i < 100 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++i) {
    const double m = 0.5 * (a + b);
    (df(m) < 0 ? a : b) = m;
  }
  return f(0.5 * (a + b));
}

std::vector<double> riemann_initial_cells(const GodunovConfig& cfg, const RiemannConfig& problem) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(std::llround((cfg.R - cfg.L) / cfg.dx));
  const double h = (cfg.R - cfg.L) / static_cast<double>(n);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = cfg.L + h * static_cast<double>(i);
    // Exact cell average of the step at x = 0.
    const double left_part = std::clamp(-a, 0.0, h) / h;
    u[i] = left_part * problem.left + (1 - left_part) * problem.right;
  }
  return u;
}

GodunovResult godunov_solve(const GodunovConfig& cfg, const RiemannConfig& problem,
                            const std::vector<double>& initial,
                            const std::vector<double>& snapshot_times) {
  cfg.validate();
  const AnalyticSolution model(problem);  // validates convexity on Y
  const auto n = static_cast<std::size_t>(std::llround((cfg.R - cfg.L) / cfg.dx));
  if (initial.size() != n) throw std::invalid_argument("godunov: initial data has the wrong number of cells");
  const double h = (cfg.R - cfg.L) / static_cast<double>(n);

  GodunovResult res;
  res.centers.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.centers[i] = cfg.L + h * (static_cast<double>(i) + 0.5);

  const auto f = [&](double y) { return model.flux(y); };
  const auto df = [&](double y) { return model.flux_derivative(y); };
  const double speed = model.lipschitz();
  res.dt = speed > 0 ? cfg.cfl * h / speed : cfg.T;

  std::vector<double> stops;
  for (double s : snapshot_times)
    if (s >= 0 && s < cfg.T) stops.push_back(s);
  std::sort(stops.begin(), stops.end());
  stops.push_back(cfg.T);

  std::vector<double> u = initial, flux(n + 1);
  double t = 0.0;
  for (double stop : stops) {
    while (t < stop - 1e-14 * std::max(1.0, stop)) {
      const double dt = std::min(res.dt, stop - t);
      const double ghost_l = cfg.boundary == GodunovBoundary::Inflow     ? cfg.left_value
                             : cfg.boundary == GodunovBoundary::Periodic ? u.back()
                                                                         : u.front();
      const double ghost_r = cfg.boundary == GodunovBoundary::Inflow     ? cfg.right_value
                             : cfg.boundary == GodunovBoundary::Periodic ? u.front()
                                                                         : u.back();
      flux[0] = godunov_flux(f, df, ghost_l, u.front());
      for (std::size_t i = 1; i < n; ++i) flux[i] = godunov_flux(f, df, u[i - 1], u[i]);
      flux[n] = godunov_flux(f, df, u.back(), ghost_r);

      double mass_before = 0.0, mass_after = 0.0;
      for (double v : u) mass_before += v;
      for (std::size_t i = 0; i < n; ++i) u[i] -= dt / h * (flux[i + 1] - flux[i]);
      for (double v : u) mass_after += v;
      res.boundary_inflow += dt * (flux[0] - flux[n]);
      if (cfg.boundary == GodunovBoundary::Periodic)
        res.max_mass_drift = std::max(res.max_mass_drift, std::abs(mass_after - mass_before) /
                                                              std::max(std::abs(mass_before), 1e-300));
      t += dt;
      ++res.steps;
    }
    t = stop;
    res.snapshots.push_back({stop, u});
  }
  return res;
}

void write_godunov_csv(std::ostream& os, const GodunovResult& r) {
  os << "t,x,y\n";
  os.precision(17);
  for (const auto& s : r.snapshots)
    for (std::size_t i = 0; i < r.centers.size(); ++i) os << s.t << ',' << r.centers[i] << ',' << s.values[i] << '\n';
}

}  // namespace emv
