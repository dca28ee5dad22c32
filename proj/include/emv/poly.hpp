#pragma once

// Sparse multivariate polynomials over named, box-bounded variables.
//
// Monomials are ordered graded-lexicographically: lower total degree first,
// and within one degree a larger power of an earlier variable comes first.
// For two variables (w1, w2) up to degree 2 this gives
//   1, w1, w2, w1^2, w1 w2, w2^2.
// The same order indexes moment vectors, moment matrices and extraction
// polynomials everywhere in the library.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emv {

inline constexpr std::size_t kMaxArity = 8;

/// Multi-index of non-negative powers, one per variable of a space.
class Exponent {
 public:
  Exponent() = default;
  explicit Exponent(std::size_t arity);
  Exponent(std::initializer_list<int> powers);
  explicit Exponent(std::span<const int> powers);

  std::size_t arity() const { return arity_; }
  int operator[](std::size_t i) const { return powers_[i]; }
  void set(std::size_t i, int power);
  int degree() const;

  /// Drops component `i`; the result has arity - 1.
  Exponent without(std::size_t i) const;
  /// Inserts `power` before position `i`; the result has arity + 1.
  Exponent with_inserted(std::size_t i, int power) const;

  Exponent operator+(const Exponent& other) const;
  bool operator==(const Exponent& other) const = default;

  std::string to_string() const;

 private:
  std::array<std::uint8_t, kMaxArity> powers_{};
  std::uint8_t arity_ = 0;
};

/// Strict weak order implementing graded lexicographic order.
struct GradedLexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

struct ExponentHash {
  std::size_t operator()(const Exponent& e) const;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double width() const { return hi - lo; }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Ordered variable names with closed, finite bounds per variable.
class VariableSpace {
 public:
  VariableSpace() = default;
  VariableSpace(std::vector<std::string> names, std::vector<Interval> bounds);

  std::size_t arity() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const Interval& bounds(std::size_t i) const { return bounds_[i]; }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Like index_of but throws std::invalid_argument for unknown names.
  std::size_t require(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }

  VariableSpace without(std::string_view name) const;

  bool operator==(const VariableSpace& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<Interval> bounds_;
};

/// All exponents of `arity` variables with total degree <= d, graded-lex order.
std::vector<Exponent> monomials_up_to(std::size_t arity, int d);
std::vector<Exponent> monomials_up_to(const VariableSpace& space, int d);

/// Number of monomials of degree <= d in n variables, C(n + d, d).
std::size_t monomial_count(std::size_t n, int d);

/// Graded-lex monomial list with constant-time reverse lookup.
class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(std::size_t arity, int degree);

  std::size_t arity() const { return arity_; }
  int degree() const { return degree_; }
  std::size_t size() const { return exponents_.size(); }
  const Exponent& operator[](std::size_t i) const { return exponents_[i]; }
  const std::vector<Exponent>& exponents() const { return exponents_; }

  /// Index of `e`, or nullopt when deg(e) exceeds the basis degree.
  std::optional<std::size_t> find(const Exponent& e) const;
  std::size_t index(const Exponent& e) const;

 private:
  std::size_t arity_ = 0;
  int degree_ = 0;
  std::vector<Exponent> exponents_;
  std::unordered_map<Exponent, std::size_t, ExponentHash> lookup_;
};

class Polynomial {
 public:
  using Terms = std::map<Exponent, double, GradedLexLess>;

  Polynomial() = default;
  explicit Polynomial(VariableSpace space);

  static Polynomial constant(const VariableSpace& space, double c);
  static Polynomial variable(const VariableSpace& space, std::string_view name);
  static Polynomial monomial(const VariableSpace& space, const Exponent& e, double c = 1.0);

  const VariableSpace& space() const { return space_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  /// Maximum total degree of the stored terms; 0 for the zero polynomial.
  int degree() const;
  double coefficient(const Exponent& e) const;

  /// Adds c * w^e, dropping the term if it cancels.
  void add_term(const Exponent& e, double c);

  double operator()(std::span<const double> point) const;
  double evaluate(std::initializer_list<double> point) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  Polynomial& operator*=(double s);
  Polynomial operator-() const;

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

  Polynomial pow(int k) const;

  /// Fixes variable `name` to `value`; the result lives on the reduced space.
  Polynomial substitute(std::string_view name, double value) const;
  /// Re-expresses the polynomial over `target`, matching variables by name.
  /// Throws if a variable carrying a non-zero power is missing from `target`.
  Polynomial embed(const VariableSpace& target) const;

  std::string to_string() const;

 private:
  void require_same_space(const Polynomial& other) const;

  VariableSpace space_;
  Terms terms_;
};

/// Formal partial derivative with respect to `var`.
Polynomial differentiate(const Polynomial& p, std::string_view var);

/// Antiderivative in `var` vanishing at var = 0.
Polynomial antiderivative(const Polynomial& p, std::string_view var);

/// Exact integral of w^e over the box of `space` restricted to `subset`.
/// Variables outside `subset` must carry a zero power. The one-dimensional
/// factors use (b^{k+1} - a^{k+1}) / (k + 1) in rational arithmetic.
double integrate_monomial_box(const Exponent& e, const VariableSpace& space,
                              std::span<const std::string> subset);

/// Exact value of the integral of s^k over [a, b].
double integrate_power(double a, double b, int k);

/// Univariate polynomial sum_k coeffs[k] * var^k, embedded in `space`.
Polynomial compose_flux(std::span<const double> coeffs, const VariableSpace& space,
                        std::string_view var = "y");

}  // namespace emv
