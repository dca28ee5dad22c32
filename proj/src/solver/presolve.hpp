#pragma once

// Reduction of an SdpProblem to  min c'x  s.t.  G x + s = h,  s in K,
// followed by Ruiz equilibration. x relates to the moment vector through
// z = z0 + N D x; the cone dual of the original problem is E zhat.

#include <string>
#include <vector>

#include "emv/sdp.hpp"
#include "emv/solver.hpp"
#include "solver/cone.hpp"

namespace emv::detail {

struct ReducedProblem {
  ConeSpec cone;
  Mat G;
  Vec h;
  Vec c;
  /// +1 when the original sense is minimize, -1 otherwise.
  double sense = 1.0;

  Vec z0;
  Mat N;
  Vec col_scale;  // D
  Vec row_scale;  // E, one entry per cone coordinate

  std::vector<std::size_t> lp_rows;     // cone LP row -> original inequality
  std::vector<std::size_t> psd_blocks;  // cone PSD block -> original block

  bool infeasible = false;
  double certificate = 0.0;
  std::string message;

  Vec moments(const Vec& x) const { return z0 + N * col_scale.cwiseProduct(x); }
};

ReducedProblem presolve(const SdpProblem& p, const SolverConfig& cfg);

struct ConeResult {
  enum class Status { Optimal, PrimalInfeasible, DualInfeasible, NotConverged };
  Status status = Status::NotConverged;
  Vec x, s, z;
  int iterations = 0;
  double certificate = 0.0;
  std::string message;
};

ConeResult solve_ipm(const ReducedProblem& rp, const SolverConfig& cfg);
ConeResult solve_admm(const ReducedProblem& rp, const SolverConfig& cfg);

}  // namespace emv::detail
