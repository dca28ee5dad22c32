// Command-line front end: solve | extract | godunov | compare | oracle.
//
// Exit codes: 0 success, 1 other error, 2 configuration or usage error,
// 3 solver did not converge, 4 problem infeasible, 5 measure not
// concentrated at the requested order.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "emv/extraction.hpp"
#include "emv/io.hpp"
#include "emv/pipeline.hpp"
#include "emv/reference.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kError = 1, kUsage = 2, kNotConverged = 3, kInfeasible = 4, kNotConcentrated = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing " + p.string());
}

// Write to a sibling temporary, then rename over the target.
void write_atomic(const fs::path& p, const std::string& content) {
  fs::path tmp = p;
  tmp += ".tmp";
  write_file(tmp, content);
  fs::rename(tmp, p);
}

class Manifest {
 public:
  explicit Manifest(std::string command) {
    doc_["command"] = std::move(command);
    doc_["versions"] = {{"emv", kVersion},
                        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                      "." + std::to_string(EIGEN_MINOR_VERSION)},
                        {"compiler", __VERSION__}};
    doc_["timings"] = json::object();
    doc_["outputs"] = json::array();
  }
  void config(const emv::RunConfig& cfg) {
    json c = json::object();
    for (const auto& [k, v] : emv::config_entries(cfg)) c[k] = v;
    doc_["config"] = c;
  }
  void timing(const std::string& stage, double s) { doc_["timings"][stage] = s; }
  void output(const fs::path& p) { doc_["outputs"].push_back(p.string()); }
  json& operator[](const std::string& k) { return doc_[k]; }
  void write(const fs::path& dir) const { write_atomic(dir / "manifest.json", doc_.dump(2) + "\n"); }

 private:
  json doc_;
};

emv::RunConfig load_or_default(const std::string& path) {
  return path.empty() ? emv::RunConfig{} : emv::load_config(path);
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir.empty() ? "." : dir);
  fs::create_directories(p);
  return p;
}

std::string moments_text(const emv::MomentSequence& m) {
  std::ostringstream os;
  emv::write_moments(os, m);
  return os.str();
}

json residuals_json(const emv::Residuals& r) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"max_equality", num(r.max_equality)},
          {"min_inequality", num(r.min_inequality)},
          {"min_psd_eigenvalue", num(r.min_psd_eigenvalue)},
          {"dual_residual", num(r.dual_residual)},
          {"relative_gap", num(r.relative_gap)}};
}

// ------------------------------------------------------------------ solve

struct SolveArgs {
  std::string config, out_dir = ".";
  std::optional<int> order;
  bool write_sdp = false;
};

int cmd_solve(const SolveArgs& a) {
  emv::RunConfig cfg = emv::load_config(a.config);
  if (a.order) {
    cfg.problem.order = *a.order;
    cfg.problem.validate();
  }
  const fs::path dir = prepare_dir(a.out_dir);
  Manifest man("solve");
  man.config(cfg);

  const emv::SolveRun run = emv::run_solve(cfg.problem, cfg.solver);
  for (const auto& [stage, s] : run.timings) man.timing(stage, s);
  for (const auto& m : run.moments) {
    const fs::path p = dir / ("moments_" + m.name() + ".txt");
    write_file(p, moments_text(m));
    man.output(p);
  }
  {
    std::ostringstream os;
    emv::write_solution(os, run.solution);
    write_file(dir / "solution.txt", os.str());
    man.output(dir / "solution.txt");
  }
  if (a.write_sdp) {
    std::ostringstream os;
    emv::write_sdp(os, run.sdp);
    write_file(dir / "problem.sdp", os.str());
    man.output(dir / "problem.sdp");
  }
  man["solver"] = {{"status", emv::to_string(run.solution.status)},
                   {"backend", run.solution.backend},
                   {"iterations", run.solution.iterations},
                   {"message", run.solution.message},
                   {"objective", run.solution.objective},
                   {"dual_objective", run.solution.dual_objective},
                   {"residuals", residuals_json(run.solution.residuals)}};
  man["problem"] = {{"variables", run.sdp.num_vars},
                    {"equalities", run.sdp.equalities.size()},
                    {"inequalities", run.sdp.inequalities.size()},
                    {"blocks", run.sdp.blocks.size()}};
  man.write(dir);

  std::printf("status %s  objective %.10g  iterations %d\n", emv::to_string(run.solution.status).c_str(),
              run.solution.objective, run.solution.iterations);
  switch (run.solution.status) {
    case emv::SolveStatus::Optimal: return kOk;
    case emv::SolveStatus::NotConverged: return kNotConverged;
    case emv::SolveStatus::Infeasible: return kInfeasible;
  }
  return kError;
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  std::string moments, config, out_dir = ".";
  std::optional<int> grid;
  std::optional<double> epsilon;
  std::vector<double> times;
};

int cmd_extract(const ExtractArgs& a) {
  emv::RunConfig cfg = load_or_default(a.config);
  if (a.grid) cfg.extraction.n_t = cfg.extraction.n_x = cfg.extraction.n_y = *a.grid;
  if (a.epsilon) cfg.extraction.epsilon = *a.epsilon;
  try {
    cfg.extraction.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = prepare_dir(a.out_dir);
  Manifest man("extract");
  man.config(cfg);
  man["moments"] = a.moments;

  std::ifstream in(a.moments);
  if (!in) throw UsageError("cannot open moment file '" + a.moments + "'");
  const emv::MomentSequence nu = emv::read_moments(in, cfg.problem.base_space());
  if (nu.order() < 1) throw UsageError("moment file degree must be >= 2");

  auto t0 = Clock::now();
  const emv::SpectralPsos ps =
      emv::spectral_psos(nu.moment_matrix(), nu.space(), nu.order(), cfg.extraction.epsilon);
  man["r"] = ps.r;
  if (ps.r == 0) {
    man.write(dir);
    std::fprintf(stderr, "measure not concentrated at this order\n");
    return kNotConcentrated;
  }
  const emv::ExtractionResult ex = emv::extract_grid(ps, cfg.extraction);
  man.timing("extract", seconds_since(t0));
  man["gamma"] = ex.gamma;

  {
    std::ostringstream os;
    emv::write_grid_csv(os, ex);
    write_file(dir / "grid.csv", os.str());
    man.output(dir / "grid.csv");
  }
  {
    std::ostringstream os;
    os.precision(17);
    os << "r " << ps.r << "\neigenvalues";
    for (Eigen::Index i = 0; i < ps.eigenvalues.size(); ++i) os << ' ' << ps.eigenvalues[i];
    os << "\np_sos " << ps.polynomial().to_string() << '\n';
    write_file(dir / "psos.txt", os.str());
    man.output(dir / "psos.txt");
  }
  if (!a.times.empty()) {
    std::ostringstream os;
    os.precision(17);
    os << "t,x\n";
    json shocks = json::array();
    for (double t : a.times) {
      const auto x = emv::locate_shock(ex, t);
      os << t << ',';
      if (x) os << *x;
      os << '\n';
      shocks.push_back({{"t", t}, {"x", x ? json(*x) : json(nullptr)}});
      if (x) std::printf("shock at t=%g: x=%.10f\n", t, *x);
      else std::printf("no shock at t=%g\n", t);
    }
    write_file(dir / "shocks.csv", os.str());
    man.output(dir / "shocks.csv");
    man["shocks"] = shocks;
  }
  man.write(dir);
  return kOk;
}

// ---------------------------------------------------------------- godunov

struct GodunovArgs {
  std::string config, out_dir = ".";
  std::optional<double> dx;
  std::vector<double> times;
};

int cmd_godunov(const GodunovArgs& a) {
  emv::RunConfig cfg = emv::load_config(a.config);
  if (a.dx) cfg.godunov_dx = *a.dx;
  const emv::GodunovConfig g = cfg.godunov();
  const fs::path dir = prepare_dir(a.out_dir);
  Manifest man("godunov");
  man.config(cfg);
  auto t0 = Clock::now();
  const auto res = emv::godunov_solve(g, cfg.problem, emv::riemann_initial_cells(g, cfg.problem), a.times);
  man.timing("godunov", seconds_since(t0));
  std::ostringstream os;
  emv::write_godunov_csv(os, res);
  write_file(dir / "godunov.csv", os.str());
  man.output(dir / "godunov.csv");
  man["steps"] = res.steps;
  man["dt"] = res.dt;
  man.write(dir);
  return kOk;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
  std::string grid, config, out_dir = ".";
  double time = 0.75;
  std::optional<double> dx;
  std::vector<double> xs;
};

struct GridCsv {
  std::map<double, std::map<double, double>> rows;  // t -> x -> y
};

GridCsv read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open grid '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line != "t,x,y") throw UsageError("grid '" + path + "' lacks the t,x,y header");
  GridCsv g;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double t, x, y;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &x, &y) != 3)
      throw UsageError("grid line " + std::to_string(lineno) + " is malformed");
    g.rows[t][x] = y;
  }
  if (g.rows.empty()) throw UsageError("grid '" + path + "' is empty");
  return g;
}

int cmd_compare(const CompareArgs& a) {
  emv::RunConfig cfg = emv::load_config(a.config);
  if (a.dx) cfg.godunov_dx = *a.dx;
  const GridCsv grid = read_grid_csv(a.grid);
  const auto& first_row = grid.rows.begin()->second;
  const double tol = 1e-9 * std::max(1.0, cfg.problem.R - cfg.problem.L);
  if (std::abs(first_row.begin()->first - cfg.problem.L) > tol ||
      std::abs(first_row.rbegin()->first - cfg.problem.R) > tol ||
      std::abs(grid.rows.begin()->first) > tol || std::abs(grid.rows.rbegin()->first - cfg.problem.T) > tol)
    throw UsageError("grid domain does not match the configuration");
  if (a.time < 0 || a.time > cfg.problem.T) throw UsageError("time lies outside [0, T]");

  // GMP row nearest to the requested time; GMP values at the nearest x.
  auto row_it = grid.rows.lower_bound(a.time);
  if (row_it == grid.rows.end())
    row_it = std::prev(row_it);
  else if (row_it != grid.rows.begin() && a.time - std::prev(row_it)->first < row_it->first - a.time)
    row_it = std::prev(row_it);
  const auto& row = row_it->second;
  auto gmp_at = [&](double x) {
    auto it = row.lower_bound(x);
    if (it == row.end()) return std::prev(it)->second;
    if (it != row.begin() && x - std::prev(it)->first < it->first - x) return std::prev(it)->second;
    return it->second;
  };

  const fs::path dir = prepare_dir(a.out_dir);
  Manifest man("compare");
  man.config(cfg);
  man["time"] = a.time;
  man["gmp_row_time"] = row_it->first;
  const emv::GodunovConfig g = cfg.godunov();
  auto t0 = Clock::now();
  const auto gd = emv::godunov_solve(g, cfg.problem, emv::riemann_initial_cells(g, cfg.problem), {a.time});
  man.timing("godunov", seconds_since(t0));
  const auto& snap = gd.snapshots.front();
  const emv::AnalyticSolution exact(cfg.problem);

  std::vector<double> xs = a.xs;
  if (xs.empty())
    for (const auto& [x, y] : row) xs.push_back(x);
  std::ostringstream os;
  os.precision(17);
  os << "x,godunov,gmp,analytic\n";
  for (double x : xs) {
    if (x < cfg.problem.L || x > cfg.problem.R) throw UsageError("sample point outside the domain");
    os << x << ',' << gd.sample(snap, x) << ',' << gmp_at(x) << ',' << exact(a.time, x) << '\n';
  }
  write_file(dir / "comparison.csv", os.str());
  man.output(dir / "comparison.csv");
  man.write(dir);
  return kOk;
}

// ----------------------------------------------------------------- oracle

struct OracleArgs {
  std::string config, kase, out_dir = ".";
  std::optional<int> order;
};

int cmd_oracle(const OracleArgs& a) {
  emv::RunConfig cfg;
  if (!a.config.empty()) cfg = emv::load_config(a.config);
  if (!a.kase.empty()) {
    if (a.kase == "shock") cfg.problem = emv::RiemannConfig::shock();
    else if (a.kase == "rarefaction") cfg.problem = emv::RiemannConfig::rarefaction();
    else throw UsageError("--case must be shock or rarefaction");
  }
  if (a.order) cfg.problem.order = *a.order;
  try {
    cfg.problem.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = prepare_dir(a.out_dir);
  Manifest man("oracle");
  man.config(cfg);
  auto t0 = Clock::now();
  for (const auto& m : emv::oracle_moment_sets(cfg.problem)) {
    const fs::path p = dir / ("moments_" + m.name() + ".txt");
    write_file(p, moments_text(m));
    man.output(p);
  }
  man.timing("oracle", seconds_since(t0));
  man.write(dir);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy solutions of scalar conservation laws via moment relaxations"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Build, assemble and solve the relaxation");
  s->add_option("--config", solve.config, "Run configuration")->required();
  s->add_option("--order", solve.order, "Relaxation order d (overrides the config)");
  s->add_option("--out-dir", solve.out_dir, "Output directory");
  s->add_flag("--write-sdp", solve.write_sdp, "Also export the assembled SDP");

  ExtractArgs extract;
  auto* e = app.add_subcommand("extract", "Extract the solution graph from occupation moments");
  e->add_option("--moments", extract.moments, "Moment file of the occupation measure")->required();
  e->add_option("--config", extract.config, "Configuration providing the domain and grid");
  e->add_option("--grid", extract.grid, "Points per grid axis");
  e->add_option("--epsilon", extract.epsilon, "Kernel-energy threshold");
  e->add_option("--time", extract.times, "Report the shock position at these times");
  e->add_option("--out-dir", extract.out_dir, "Output directory");

  GodunovArgs godunov;
  auto* g = app.add_subcommand("godunov", "Run the Godunov reference scheme");
  g->add_option("--config", godunov.config, "Run configuration")->required();
  g->add_option("--dx", godunov.dx, "Mesh size");
  g->add_option("--time", godunov.times, "Extra snapshot times");
  g->add_option("--out-dir", godunov.out_dir, "Output directory");

  CompareArgs compare;
  auto* c = app.add_subcommand("compare", "Tabulate Godunov, extracted and analytic profiles");
  c->add_option("--grid", compare.grid, "Extracted grid CSV")->required();
  c->add_option("--config", compare.config, "Run configuration")->required();
  c->add_option("--time", compare.time, "Comparison time");
  c->add_option("--dx", compare.dx, "Godunov mesh size");
  c->add_option("--x", compare.xs, "Sample points (default: the grid abscissae)");
  c->add_option("--out-dir", compare.out_dir, "Output directory");

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "Write analytic moment files");
  o->add_option("--config", oracle.config, "Run configuration");
  o->add_option("--case", oracle.kase, "shock or rarefaction preset");
  o->add_option("--order", oracle.order, "Relaxation order d");
  o->add_option("--out-dir", oracle.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return cmd_solve(solve);
    if (*e) return cmd_extract(extract);
    if (*g) return cmd_godunov(godunov);
    if (*c) return cmd_compare(compare);
    if (*o) return cmd_oracle(oracle);
  } catch (const emv::ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return kUsage;
  } catch (const UsageError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kUsage;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kError;
  }
  return kError;
}
