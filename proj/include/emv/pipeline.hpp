#pragma once

// End-to-end stages shared by the command-line tool and the acceptance
// suite: build the GMP, assemble the SDP, solve, and split the moments.

#include <map>
#include <string>
#include <vector>

#include "emv/gmp.hpp"
#include "emv/io.hpp"
#include "emv/sdp.hpp"
#include "emv/solver.hpp"

namespace emv {

struct SolveRun {
  GmpProblem gmp;
  SdpProblem sdp;
  SdpSolution solution;
  std::vector<MomentSequence> moments;  // one per measure, layout order
  /// Wall time in seconds per stage: build, assemble, solve.
  std::map<std::string, double> timings;

  const MomentSequence& measure(std::string_view name) const;
};

SolveRun run_solve(const RiemannConfig& problem, const SolverConfig& solver);

/// Analytic moments of every measure the configuration declares.
std::vector<MomentSequence> oracle_moment_sets(const RiemannConfig& problem);

}  // namespace emv
