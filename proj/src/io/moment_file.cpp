#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "emv/io.hpp"

namespace emv {

void write_moments(std::ostream& os, const MomentSequence& m) {
  const MonomialBasis& basis = m.basis();
  os << "measure " << m.name() << " arity " << basis.arity() << " degree " << basis.degree() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t k = 0; k < basis.arity(); ++k) os << basis[i][k] << ' ';
    std::snprintf(buf, sizeof buf, "%.17g", m.values()[static_cast<Eigen::Index>(i)]);
    os << buf << '\n';
  }
}

MomentSequence read_moments(std::istream& is, const VariableSpace& space) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("moment file: missing header");
  std::istringstream head(line);
  std::string w_measure, name, w_arity, w_degree;
  std::size_t arity = 0;
  int degree = -1;
  head >> w_measure >> name >> w_arity >> arity >> w_degree >> degree;
  if (!head || w_measure != "measure" || w_arity != "arity" || w_degree != "degree")
    throw std::runtime_error("moment file: malformed header '" + line + "'");
  if (arity != space.arity())
    throw std::runtime_error("moment file: arity " + std::to_string(arity) + " does not match the space");
  if (degree < 0 || degree % 2 != 0) throw std::runtime_error("moment file: degree must be even and >= 0");

  MomentSequence m(name, space, degree / 2);
  std::vector<bool> filled(m.basis().size(), false);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::vector<int> powers(arity);
    for (auto& p : powers) row >> p;
    double value = 0.0;
    row >> value;
    std::string rest;
    if (!row || (row >> rest))
      throw std::runtime_error("moment file: line " + std::to_string(lineno) + " is malformed");
    for (int p : powers)
      if (p < 0) throw std::runtime_error("moment file: negative power on line " + std::to_string(lineno));
    const Exponent e{std::span<const int>(powers)};
    const auto idx = m.basis().find(e);
    if (!idx) throw std::runtime_error("moment file: exponent on line " + std::to_string(lineno) + " exceeds the degree");
    if (filled[*idx]) throw std::runtime_error("moment file: duplicate exponent on line " + std::to_string(lineno));
    filled[*idx] = true;
    m.values()[static_cast<Eigen::Index>(*idx)] = value;
  }
  for (std::size_t i = 0; i < filled.size(); ++i)
    if (!filled[i]) throw std::runtime_error("moment file: missing exponent " + m.basis()[i].to_string());
  return m;
}

}  // namespace emv
