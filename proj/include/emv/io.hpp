#pragma once

// Text formats: the flat `key = value` run configuration and the
// per-measure moment files.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "emv/extraction.hpp"
#include "emv/gmp.hpp"
#include "emv/reference.hpp"
#include "emv/sdp.hpp"
#include "emv/solver.hpp"

namespace emv {

struct RunConfig {
  RiemannConfig problem = RiemannConfig::shock();
  SolverConfig solver;
  ExtractionConfig extraction;
  /// Godunov mesh and CFL; the domain, final time and boundary states are
  /// taken from `problem`.
  double godunov_dx = 0.0005;
  double godunov_cfl = 0.25;

  GodunovConfig godunov() const;
};

/// Parse failure with the 1-based line number (0 when not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// `#` starts a comment; blank lines are ignored. The `case` key selects a
/// preset and is applied before every other key wherever it appears.
/// Unknown or repeated keys and malformed values throw ConfigError.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// Every key with its current value, in documentation order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);
void write_config(std::ostream& os, const RunConfig& cfg);

/// Header `measure <name> arity <n> degree <2d>`, then `e_1 .. e_n value`
/// per exponent in graded-lex order with 17 significant digits.
void write_moments(std::ostream& os, const MomentSequence& m);
/// The file carries no bounds, so the caller supplies the space; its arity
/// must match the header.
MomentSequence read_moments(std::istream& is, const VariableSpace& space);

}  // namespace emv
