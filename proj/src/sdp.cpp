#include "emv/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace emv {

namespace {

void merge_terms(std::vector<SparseTerm>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const SparseTerm& a, const SparseTerm& b) { return a.index < b.index; });
  std::vector<SparseTerm> out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().index == t.index)
      out.back().coef += t.coef;
    else
      out.push_back(t);
  }
  std::erase_if(out, [](const SparseTerm& t) { return t.coef == 0.0; });
  terms = std::move(out);
}

void append_riesz(std::vector<SparseTerm>& row, const Polynomial& p, const MonomialBasis& basis,
                  std::size_t offset) {
  for (const auto& [e, c] : p.terms()) {
    auto i = basis.find(e);
    if (!i) throw std::invalid_argument("integrand degree exceeds the relaxation order");
    row.push_back({offset + *i, c});
  }
}

}  // namespace

// ----------------------------------------------------------- MomentSequence

MomentSequence::MomentSequence(std::string name, VariableSpace space, int order)
    : name_(std::move(name)),
      space_(std::move(space)),
      order_(order),
      basis_(space_.arity(), 2 * order),
      values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_.size()))) {
  if (order < 0) throw std::invalid_argument("moment sequence: negative order");
}

MomentSequence::MomentSequence(std::string name, VariableSpace space, int order,
                               Eigen::VectorXd values)
    : MomentSequence(std::move(name), std::move(space), order) {
  if (values.size() != values_.size())
    throw std::invalid_argument("moment sequence: expected " + std::to_string(values_.size()) +
                                " values, got " + std::to_string(values.size()));
  values_ = std::move(values);
}

Eigen::MatrixXd MomentSequence::moment_matrix() const {
  return moment_matrix_map(space_.arity(), order_).evaluate(values_);
}

Eigen::MatrixXd MomentSequence::localizing_matrix(const Polynomial& g) const {
  if (g.space().arity() != space_.arity())
    throw std::invalid_argument("localizing polynomial arity mismatch");
  return localizing_matrix_map(g, order_).evaluate(values_);
}

double riesz(const MomentSequence& z, const Polynomial& p) {
  if (p.space().arity() != z.space().arity())
    throw std::invalid_argument("riesz: polynomial arity mismatch");
  double s = 0.0;
  for (const auto& [e, c] : p.terms()) {
    auto i = z.basis().find(e);
    if (!i)
      throw std::invalid_argument("riesz: degree " + std::to_string(e.degree()) +
                                  " exceeds 2d = " + std::to_string(2 * z.order()));
    s += c * z.values()[static_cast<Eigen::Index>(*i)];
  }
  return s;
}

// ------------------------------------------------------------ affine pieces

double AffineExpr::evaluate(const Eigen::VectorXd& z) const {
  double s = constant;
  for (const auto& t : terms) s += t.coef * z[static_cast<Eigen::Index>(t.index)];
  return s;
}

void AffineExpr::normalize() { merge_terms(terms); }

double LinearRow::evaluate(const Eigen::VectorXd& z) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.coef * z[static_cast<Eigen::Index>(t.index)];
  return s;
}

Eigen::MatrixXd AffineSymMatrix::evaluate(const Eigen::VectorXd& z) const {
  const auto n = static_cast<Eigen::Index>(size);
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      M(i, j) = M(j, i) = packed[packed_index(static_cast<std::size_t>(i),
                                              static_cast<std::size_t>(j))]
                              .evaluate(z);
  return M;
}

AffineSymMatrix moment_matrix_map(std::size_t arity, int d, std::size_t offset) {
  if (d < 0) throw std::invalid_argument("moment matrix: negative order");
  const MonomialBasis half(arity, d);
  const MonomialBasis full(arity, 2 * d);
  AffineSymMatrix m;
  m.size = half.size();
  m.packed.resize(packed_size(m.size));
  for (std::size_t j = 0; j < m.size; ++j)
    for (std::size_t i = 0; i <= j; ++i)
      m.packed[packed_index(i, j)].terms.push_back({offset + full.index(half[i] + half[j]), 1.0});
  return m;
}

AffineSymMatrix localizing_matrix_map(const Polynomial& g, int d, std::size_t offset) {
  const int shift = (g.degree() + 1) / 2;
  if (d - shift < 0)
    throw std::invalid_argument("localizing matrix: order " + std::to_string(d) +
                                " too small for a degree " + std::to_string(g.degree()) +
                                " polynomial");
  const std::size_t arity = g.space().arity();
  const MonomialBasis half(arity, d - shift);
  const MonomialBasis full(arity, 2 * d);
  AffineSymMatrix m;
  m.size = half.size();
  m.packed.resize(packed_size(m.size));
  for (std::size_t j = 0; j < m.size; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      auto& entry = m.packed[packed_index(i, j)];
      const Exponent base = half[i] + half[j];
      for (const auto& [e, c] : g.terms()) entry.terms.push_back({offset + full.index(e + base), c});
      entry.normalize();
    }
  }
  return m;
}

// --------------------------------------------------------------- SdpProblem

double SdpProblem::objective_value(const Eigen::VectorXd& z) const {
  double s = objective_offset;
  for (const auto& t : objective) s += t.coef * z[static_cast<Eigen::Index>(t.index)];
  return s;
}

const MeasureLayout& SdpProblem::measure(std::string_view name) const {
  for (const auto& m : layout)
    if (m.name == name) return m;
  throw std::invalid_argument("no measure '" + std::string(name) + "' in SDP layout");
}

void SdpProblem::validate() const {
  auto check = [&](const std::vector<SparseTerm>& terms, const std::string& where) {
    for (const auto& t : terms) {
      if (t.index >= num_vars) throw std::invalid_argument(where + ": variable index out of range");
      if (!std::isfinite(t.coef)) throw std::invalid_argument(where + ": non-finite coefficient");
    }
  };
  check(objective, "objective");
  for (const auto& r : equalities) check(r.terms, "equality");
  for (const auto& r : inequalities) check(r.terms, "inequality");
  for (const auto& b : blocks) {
    if (b.map.size == 0 || b.map.packed.size() != packed_size(b.map.size))
      throw std::invalid_argument("block '" + b.label + "': packed length does not match size");
    for (const auto& e : b.map.packed) check(e.terms, "block '" + b.label + "'");
  }
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::NotConverged: return "NotConverged";
    case SolveStatus::Infeasible: return "Infeasible";
  }
  return "?";
}

MomentSequence SdpSolution::moments(const SdpProblem& p, std::string_view measure) const {
  const auto& m = p.measure(measure);
  return MomentSequence(m.name, m.space, p.order,
                        z.segment(static_cast<Eigen::Index>(m.offset),
                                  static_cast<Eigen::Index>(m.length)));
}

std::vector<MomentSequence> split_moments(const SdpProblem& p, const Eigen::VectorXd& z) {
  if (static_cast<std::size_t>(z.size()) != p.num_vars)
    throw std::invalid_argument("split_moments: vector length mismatch");
  std::vector<MomentSequence> out;
  for (const auto& m : p.layout)
    out.emplace_back(m.name, m.space, p.order,
                     z.segment(static_cast<Eigen::Index>(m.offset),
                               static_cast<Eigen::Index>(m.length)));
  return out;
}

SdpProblem assemble(const GmpProblem& gmp) {
  SdpProblem sdp;
  const int d = gmp.order;
  sdp.order = d;
  std::vector<MonomialBasis> bases;
  for (const auto& m : gmp.measures) {
    bases.emplace_back(m.space().arity(), 2 * d);
    sdp.layout.push_back({m.name, m.space(), sdp.num_vars, bases.back().size()});
    sdp.num_vars += bases.back().size();
  }
  auto locate = [&](const std::string& name) -> std::size_t {
    auto i = gmp.measure_index(name);
    if (!i) throw std::invalid_argument("constraint references undeclared measure '" + name + "'");
    return *i;
  };

  for (std::size_t k = 0; k < gmp.measures.size(); ++k) {
    const auto& m = gmp.measures[k];
    const std::size_t off = sdp.layout[k].offset;
    sdp.blocks.push_back({m.name + ":moment", moment_matrix_map(m.space().arity(), d, off)});
    for (std::size_t j = 0; j < m.support.inequalities.size(); ++j)
      sdp.blocks.push_back({m.name + ":g" + std::to_string(j + 1),
                            localizing_matrix_map(m.support.inequalities[j], d, off)});
  }

  for (const auto& c : gmp.constraints) {
    LinearRow row;
    row.rhs = c.rhs;
    for (const auto& t : c.terms) {
      const std::size_t k = locate(t.measure);
      append_riesz(row.terms, t.integrand, bases[k], sdp.layout[k].offset);
    }
    merge_terms(row.terms);
    (c.relation == Relation::Equal ? sdp.equalities : sdp.inequalities).push_back(std::move(row));
  }

  sdp.sense = gmp.objective.sense;
  if (gmp.objective.kind == ObjectiveKind::TraceMin) {
    for (std::size_t k = 0; k < gmp.measures.size(); ++k) {
      if (gmp.objective.trace_scope == TraceScope::OccupationOnly && gmp.measures[k].name != "nu")
        continue;
      const MonomialBasis half(gmp.measures[k].space().arity(), d);
      for (const auto& e : half.exponents())
        sdp.objective.push_back({sdp.layout[k].offset + bases[k].index(e + e), 1.0});
    }
  } else {
    for (const auto& t : gmp.objective.terms) {
      const std::size_t k = locate(t.measure);
      append_riesz(sdp.objective, t.integrand, bases[k], sdp.layout[k].offset);
    }
  }
  merge_terms(sdp.objective);
  return sdp;
}

}  // namespace emv
