#include "emv/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace emv {

namespace {

std::vector<double> uniform_grid(const Interval& I, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = I.lo + I.width() * i / (n - 1);
  return g;
}

// For fixed (t, x), the eigen-polynomials restricted to the y line:
// coefs(i, k) multiplies y^k in polynomial i.
class LineRestriction {
 public:
  explicit LineRestriction(const SpectralPsos& ps) : ps_(ps), basis_(ps.space.arity(), ps.order) {
    if (ps.space.arity() != 3) throw std::invalid_argument("extraction expects a (t,x,y) space");
  }

  Eigen::MatrixXd coefs(double t, double x) const {
    const auto r = static_cast<Eigen::Index>(ps_.r);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(r, ps_.order + 1);
    for (std::size_t m = 0; m < basis_.size(); ++m) {
      const Exponent& e = basis_[m];
      const double w = std::pow(t, e[0]) * std::pow(x, e[1]);
      C.col(e[2]) += w * ps_.eigenvectors.row(static_cast<Eigen::Index>(m)).head(r).transpose();
    }
    return C;
  }

  static double value(const Eigen::MatrixXd& C, double y) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < C.rows(); ++i) {
      double h = 0.0;
      for (Eigen::Index k = C.cols() - 1; k >= 0; --k) h = h * y + C(i, k);
      s += h * h;
    }
    return s;
  }

 private:
  const SpectralPsos& ps_;
  MonomialBasis basis_;
};

std::size_t argmin_index(const Eigen::MatrixXd& C, const std::vector<double>& ys) {
  std::size_t best = 0;
  double best_v = LineRestriction::value(C, ys[0]);
  for (std::size_t k = 1; k < ys.size(); ++k) {
    const double v = LineRestriction::value(C, ys[k]);
    if (v < best_v) {  // strict: ties keep the smaller index
      best_v = v;
      best = k;
    }
  }
  return best;
}

}  // namespace

void ExtractionConfig::validate() const {
  if (!(epsilon > 0)) throw std::invalid_argument("extraction epsilon must be positive");
  if (n_t < 2 || n_x < 2 || n_y < 2) throw std::invalid_argument("extraction grids need at least 2 points");
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("extraction beta must lie in (0, 1)");
}

double SpectralPsos::operator()(std::span<const double> w) const {
  const MonomialBasis basis(space.arity(), order);
  Eigen::VectorXd b(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t m = 0; m < basis.size(); ++m) {
    double v = 1.0;
    for (std::size_t i = 0; i < space.arity(); ++i) v *= std::pow(w[i], basis[m][i]);
    b[static_cast<Eigen::Index>(m)] = v;
  }
  return (eigenvectors.leftCols(static_cast<Eigen::Index>(r)).transpose() * b).squaredNorm();
}

Polynomial SpectralPsos::polynomial() const {
  const MonomialBasis basis(space.arity(), order);
  Polynomial out(space);
  for (std::size_t i = 0; i < r; ++i) {
    Polynomial q(space);
    for (std::size_t m = 0; m < basis.size(); ++m)
      q.add_term(basis[m], eigenvectors(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)));
    out += q * q;
  }
  return out;
}

double SpectralPsos::kernel_energy() const {
  double s = 0.0;
  for (std::size_t i = 0; i < r; ++i) s += std::max(eigenvalues[static_cast<Eigen::Index>(i)], 0.0);
  return s;
}

SpectralPsos spectral_psos(const Eigen::MatrixXd& M, const VariableSpace& space, int order,
                           double epsilon) {
  if (!(epsilon > 0)) throw std::invalid_argument("spectral_psos: epsilon must be positive");
  const auto n = static_cast<Eigen::Index>(monomial_count(space.arity(), order));
  if (M.rows() != n || M.cols() != n)
    throw std::invalid_argument("spectral_psos: moment matrix has the wrong size");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("spectral_psos: moment matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  SpectralPsos out;
  out.space = space;
  out.order = order;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  double cum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cum += std::max(out.eigenvalues[i], 0.0);
    if (!(cum < epsilon)) break;
    out.r = static_cast<std::size_t>(i + 1);
  }
  return out;
}

double concentration_level(const Eigen::VectorXd& eigenvalues, std::size_t r, double beta) {
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("concentration_level: beta must lie in (0, 1)");
  if (r > static_cast<std::size_t>(eigenvalues.size()))
    throw std::invalid_argument("concentration_level: r exceeds the number of eigenvalues");
  double s = 0.0;
  for (std::size_t i = 0; i < r; ++i) s += std::max(eigenvalues[static_cast<Eigen::Index>(i)], 0.0);
  return s / beta;
}

ExtractionResult extract_grid(const SpectralPsos& psos, const ExtractionConfig& cfg) {
  cfg.validate();
  if (psos.r == 0) throw std::runtime_error("measure not concentrated at this order");
  ExtractionResult res;
  res.psos = psos;
  res.t = uniform_grid(psos.space.bounds(0), cfg.n_t);
  res.x = uniform_grid(psos.space.bounds(1), cfg.n_x);
  res.y = uniform_grid(psos.space.bounds(2), cfg.n_y);
  res.values.resize(cfg.n_t, cfg.n_x);
  const LineRestriction line(psos);
  for (int i = 0; i < cfg.n_t; ++i)
    for (int j = 0; j < cfg.n_x; ++j)
      res.values(i, j) = res.y[argmin_index(line.coefs(res.t[static_cast<std::size_t>(i)],
                                                       res.x[static_cast<std::size_t>(j)]),
                                            res.y)];
  res.gamma = concentration_level(psos.eigenvalues, psos.r, cfg.beta);
  return res;
}

ExtractionResult extract(const MomentSequence& nu, const ExtractionConfig& cfg) {
  cfg.validate();
  return extract_grid(spectral_psos(nu.moment_matrix(), nu.space(), nu.order(), cfg.epsilon), cfg);
}

double argmin_y(const ExtractionResult& result, double t, double x) {
  const LineRestriction line(result.psos);
  return result.y[argmin_index(line.coefs(t, x), result.y)];
}

std::optional<double> locate_shock(const ExtractionResult& result, double t, bool refine) {
  const Interval& T = result.psos.space.bounds(0);
  if (!T.contains(t)) throw std::invalid_argument("locate_shock: t lies outside the time interval");
  const Interval& Y = result.psos.space.bounds(2);
  const double threshold = 0.5 * Y.width();

  std::vector<double> row(result.x.size());
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = argmin_y(result, t, result.x[j]);
  for (std::size_t j = 0; j + 1 < row.size(); ++j) {
    if (std::abs(row[j + 1] - row[j]) <= threshold) continue;
    double a = result.x[j], b = result.x[j + 1];
    if (!refine) return 0.5 * (a + b);
    const double left = row[j], right = row[j + 1];
    // Invariant: argmin at a is nearer `left`, at b nearer `right`.
    while (b - a > 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a))) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      const double v = argmin_y(result, t, m);
      (std::abs(v - left) <= std::abs(v - right) ? a : b) = m;
    }
    return 0.5 * (a + b);
  }
  return std::nullopt;
}

void write_grid_csv(std::ostream& os, const ExtractionResult& result) {
  os << "t,x,y\n";
  os.precision(17);
  for (std::size_t i = 0; i < result.t.size(); ++i)
    for (std::size_t j = 0; j < result.x.size(); ++j)
      os << result.t[i] << ',' << result.x[j] << ','
         << result.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) << '\n';
}

}  // namespace emv
