#include "emv/pipeline.hpp"

#include <chrono>
#include <stdexcept>

#include "emv/reference.hpp"

namespace emv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

const MomentSequence& SolveRun::measure(std::string_view name) const {
  for (const auto& m : moments)
    if (m.name() == name) return m;
  throw std::out_of_range("no measure named " + std::string(name));
}

SolveRun run_solve(const RiemannConfig& problem, const SolverConfig& solver) {
  SolveRun run;
  auto t0 = Clock::now();
  run.gmp = build_gmp(problem);
  run.timings["build"] = seconds_since(t0);
  t0 = Clock::now();
  run.sdp = assemble(run.gmp);
  run.timings["assemble"] = seconds_since(t0);
  t0 = Clock::now();
  run.solution = solve(run.sdp, solver);
  run.timings["solve"] = seconds_since(t0);
  run.moments = split_moments(run.sdp, run.solution.z);
  return run;
}

std::vector<MomentSequence> oracle_moment_sets(const RiemannConfig& problem) {
  const AnalyticSolution sol(problem);
  std::vector<MomentSequence> out;
  for (const auto& m : declare_measures(problem)) out.push_back(analytic_moments(sol, m, problem.order));
  return out;
}

}  // namespace emv
