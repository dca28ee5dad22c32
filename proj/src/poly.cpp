#include "emv/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace emv {

namespace {

using Rational = boost::multiprecision::cpp_rational;

Rational to_rational(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite bound");
  return Rational(v);
}

Rational rational_pow(const Rational& base, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

Rational power_integral(double a, double b, int k) {
  const Rational ra = to_rational(a);
  const Rational rb = to_rational(b);
  return (rational_pow(rb, k + 1) - rational_pow(ra, k + 1)) / Rational(k + 1);
}

}  // namespace

// ---------------------------------------------------------------- Exponent

Exponent::Exponent(std::size_t arity) : arity_(static_cast<std::uint8_t>(arity)) {
  if (arity > kMaxArity) throw std::invalid_argument("exponent arity exceeds kMaxArity");
}

Exponent::Exponent(std::initializer_list<int> powers)
    : Exponent(std::span<const int>(powers.begin(), powers.size())) {}

Exponent::Exponent(std::span<const int> powers) : Exponent(powers.size()) {
  for (std::size_t i = 0; i < powers.size(); ++i) set(i, powers[i]);
}

void Exponent::set(std::size_t i, int power) {
  if (i >= arity_) throw std::out_of_range("exponent index");
  if (power < 0 || power > 255) throw std::invalid_argument("exponent power out of range");
  powers_[i] = static_cast<std::uint8_t>(power);
}

int Exponent::degree() const {
  int d = 0;
  for (std::size_t i = 0; i < arity_; ++i) d += powers_[i];
  return d;
}

Exponent Exponent::without(std::size_t i) const {
  if (i >= arity_) throw std::out_of_range("exponent index");
  Exponent r(arity_ - 1u);
  for (std::size_t k = 0, j = 0; k < arity_; ++k)
    if (k != i) r.powers_[j++] = powers_[k];
  return r;
}

Exponent Exponent::with_inserted(std::size_t i, int power) const {
  if (i > arity_) throw std::out_of_range("exponent index");
  Exponent r(arity_ + 1u);
  for (std::size_t k = 0, j = 0; k < r.arity_; ++k)
    r.powers_[k] = (k == i) ? static_cast<std::uint8_t>(power) : powers_[j++];
  return r;
}

Exponent Exponent::operator+(const Exponent& other) const {
  if (other.arity_ != arity_) throw std::invalid_argument("exponent arity mismatch");
  Exponent r(arity_);
  for (std::size_t i = 0; i < arity_; ++i) r.set(i, powers_[i] + other.powers_[i]);
  return r;
}

std::string Exponent::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < arity_; ++i) os << (i ? "," : "") << int(powers_[i]);
  os << ')';
  return os.str();
}

bool GradedLexLess::operator()(const Exponent& a, const Exponent& b) const {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db;
  const std::size_t n = std::min(a.arity(), b.arity());
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return a.arity() < b.arity();
}

std::size_t ExponentHash::operator()(const Exponent& e) const {
  std::size_t h = e.arity();
  for (std::size_t i = 0; i < e.arity(); ++i) h = h * 131u + static_cast<std::size_t>(e[i]);
  return h;
}

// ----------------------------------------------------------- VariableSpace

VariableSpace::VariableSpace(std::vector<std::string> names, std::vector<Interval> bounds)
    : names_(std::move(names)), bounds_(std::move(bounds)) {
  if (names_.size() != bounds_.size())
    throw std::invalid_argument("variable space: names and bounds differ in length");
  if (names_.size() > kMaxArity) throw std::invalid_argument("variable space: too many variables");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const auto& b = bounds_[i];
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi))
      throw std::invalid_argument("variable space: bounds of '" + names_[i] +
                                  "' must be finite with lo < hi");
    for (std::size_t j = 0; j < i; ++j)
      if (names_[j] == names_[i])
        throw std::invalid_argument("variable space: duplicate name '" + names_[i] + "'");
  }
}

std::optional<std::size_t> VariableSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::size_t VariableSpace::require(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
}

VariableSpace VariableSpace::without(std::string_view name) const {
  const std::size_t k = require(name);
  std::vector<std::string> n;
  std::vector<Interval> b;
  for (std::size_t i = 0; i < arity(); ++i) {
    if (i == k) continue;
    n.push_back(names_[i]);
    b.push_back(bounds_[i]);
  }
  return VariableSpace(std::move(n), std::move(b));
}

bool VariableSpace::operator==(const VariableSpace& other) const {
  if (names_ != other.names_) return false;
  for (std::size_t i = 0; i < bounds_.size(); ++i)
    if (bounds_[i].lo != other.bounds_[i].lo || bounds_[i].hi != other.bounds_[i].hi) return false;
  return true;
}

// ---------------------------------------------------------------- monomials

std::vector<Exponent> monomials_up_to(std::size_t arity, int d) {
  if (d < 0) throw std::invalid_argument("monomials_up_to: negative degree");
  std::vector<Exponent> out;
  out.reserve(monomial_count(arity, d));
  if (arity == 0) {
    out.emplace_back(0);
    return out;
  }
  Exponent cur(arity);
  // Depth-first over components, larger powers first, per total degree.
  std::function<void(std::size_t, int)> rec = [&](std::size_t k, int remaining) {
    if (k + 1 == arity) {
      cur.set(k, remaining);
      out.push_back(cur);
      return;
    }
    for (int p = remaining; p >= 0; --p) {
      cur.set(k, p);
      rec(k + 1, remaining - p);
    }
  };
  for (int deg = 0; deg <= d; ++deg) rec(0, deg);
  return out;
}

std::vector<Exponent> monomials_up_to(const VariableSpace& space, int d) {
  return monomials_up_to(space.arity(), d);
}

std::size_t monomial_count(std::size_t n, int d) {
  if (d < 0) return 0;
  // C(n + d, d) computed incrementally; exact for the sizes used here.
  std::size_t c = 1;
  for (std::size_t i = 1; i <= n; ++i) c = c * (static_cast<std::size_t>(d) + i) / i;
  return c;
}

MonomialBasis::MonomialBasis(std::size_t arity, int degree)
    : arity_(arity), degree_(degree), exponents_(monomials_up_to(arity, degree)) {
  lookup_.reserve(exponents_.size());
  for (std::size_t i = 0; i < exponents_.size(); ++i) lookup_.emplace(exponents_[i], i);
}

std::optional<std::size_t> MonomialBasis::find(const Exponent& e) const {
  auto it = lookup_.find(e);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t MonomialBasis::index(const Exponent& e) const {
  if (auto i = find(e)) return *i;
  throw std::out_of_range("monomial " + e.to_string() + " outside basis of degree " +
                          std::to_string(degree_));
}

// --------------------------------------------------------------- Polynomial

Polynomial::Polynomial(VariableSpace space) : space_(std::move(space)) {}

Polynomial Polynomial::constant(const VariableSpace& space, double c) {
  Polynomial p(space);
  p.add_term(Exponent(space.arity()), c);
  return p;
}

Polynomial Polynomial::variable(const VariableSpace& space, std::string_view name) {
  Exponent e(space.arity());
  e.set(space.require(name), 1);
  return monomial(space, e, 1.0);
}

Polynomial Polynomial::monomial(const VariableSpace& space, const Exponent& e, double c) {
  if (e.arity() != space.arity()) throw std::invalid_argument("monomial arity mismatch");
  Polynomial p(space);
  p.add_term(e, c);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e.degree());
  return d;
}

double Polynomial::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Exponent& e, double c) {
  if (e.arity() != space_.arity()) throw std::invalid_argument("term arity mismatch");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::operator()(std::span<const double> point) const {
  if (point.size() != space_.arity()) throw std::invalid_argument("evaluation point arity");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (std::size_t i = 0; i < e.arity(); ++i)
      for (int k = 0; k < e[i]; ++k) m *= point[i];
    sum += m;
  }
  return sum;
}

double Polynomial::evaluate(std::initializer_list<double> point) const {
  return (*this)(std::span<const double>(point.begin(), point.size()));
}

void Polynomial::require_same_space(const Polynomial& other) const {
  if (!(space_ == other.space_)) throw std::invalid_argument("polynomials over different spaces");
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  require_same_space(other);
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  require_same_space(other);
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.require_same_space(b);
  Polynomial r(a.space_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, ca * cb);
  return r;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  *this = *this * other;
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  r *= -1.0;
  return r;
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw std::invalid_argument("negative polynomial power");
  Polynomial r = constant(space_, 1.0);
  for (int i = 0; i < k; ++i) r *= *this;
  return r;
}

Polynomial Polynomial::substitute(std::string_view name, double value) const {
  const std::size_t k = space_.require(name);
  Polynomial r(space_.without(name));
  for (const auto& [e, c] : terms_) r.add_term(e.without(k), c * std::pow(value, e[k]));
  return r;
}

Polynomial Polynomial::embed(const VariableSpace& target) const {
  std::vector<std::size_t> map(space_.arity());
  std::vector<bool> present(space_.arity());
  for (std::size_t i = 0; i < space_.arity(); ++i) {
    auto j = target.index_of(space_.name(i));
    present[i] = j.has_value();
    map[i] = j.value_or(0);
  }
  Polynomial r(target);
  for (const auto& [e, c] : terms_) {
    Exponent te(target.arity());
    for (std::size_t i = 0; i < e.arity(); ++i) {
      if (e[i] == 0) continue;
      if (!present[i])
        throw std::invalid_argument("embed: variable '" + space_.name(i) + "' missing in target");
      te.set(map[i], e[i]);
    }
    r.add_term(te, c);
  }
  return r;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << '-';
    first = false;
    os << std::abs(c);
    for (std::size_t i = 0; i < e.arity(); ++i) {
      if (e[i] == 0) continue;
      os << '*' << space_.name(i);
      if (e[i] > 1) os << '^' << int(e[i]);
    }
  }
  return os.str();
}

Polynomial differentiate(const Polynomial& p, std::string_view var) {
  const std::size_t k = p.space().require(var);
  Polynomial r(p.space());
  for (const auto& [e, c] : p.terms()) {
    if (e[k] == 0) continue;
    Exponent d = e;
    d.set(k, e[k] - 1);
    r.add_term(d, c * e[k]);
  }
  return r;
}

Polynomial antiderivative(const Polynomial& p, std::string_view var) {
  const std::size_t k = p.space().require(var);
  Polynomial r(p.space());
  for (const auto& [e, c] : p.terms()) {
    Exponent a = e;
    a.set(k, e[k] + 1);
    r.add_term(a, c / (e[k] + 1));
  }
  return r;
}

double integrate_power(double a, double b, int k) {
  if (k < 0) throw std::invalid_argument("integrate_power: negative power");
  return power_integral(a, b, k).convert_to<double>();
}

double integrate_monomial_box(const Exponent& e, const VariableSpace& space,
                              std::span<const std::string> subset) {
  if (e.arity() != space.arity()) throw std::invalid_argument("exponent arity mismatch");
  std::vector<bool> in_subset(space.arity(), false);
  for (const auto& name : subset) in_subset[space.require(name)] = true;
  Rational value = 1;
  for (std::size_t i = 0; i < space.arity(); ++i) {
    if (!in_subset[i]) {
      if (e[i] != 0)
        throw std::invalid_argument("integrate_monomial_box: variable '" + space.name(i) +
                                    "' outside subset carries a non-zero power");
      continue;
    }
    value *= power_integral(space.bounds(i).lo, space.bounds(i).hi, e[i]);
  }
  return value.convert_to<double>();
}

Polynomial compose_flux(std::span<const double> coeffs, const VariableSpace& space,
                        std::string_view var) {
  if (coeffs.empty()) throw std::invalid_argument("compose_flux: empty coefficient list");
  const std::size_t k = space.require(var);
  Polynomial f(space);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    Exponent e(space.arity());
    e.set(k, static_cast<int>(j));
    f.add_term(e, coeffs[j]);
  }
  return f;
}

}  // namespace emv
