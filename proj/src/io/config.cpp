#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "emv/io.hpp"

namespace emv {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a number, got '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument("expected a number, got '" + v + "'");
  return d;
}

long to_long(const std::string& v) {
  long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw std::invalid_argument("expected an integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& v) {
  const long l = to_long(v);
  if (l < std::numeric_limits<int>::min() || l > std::numeric_limits<int>::max())
    throw std::invalid_argument("integer out of range: '" + v + "'");
  return static_cast<int>(l);
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list");
  return out;
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class E>
E choose(const std::string& v, std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, value] : options) {
    if (v == name) return value;
    names += names.empty() ? name : std::string("|") + name;
  }
  throw std::invalid_argument("expected one of " + names + ", got '" + v + "'");
}

struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

// Documentation order.
const std::vector<std::pair<std::string, Key>>& keys() {
  static const std::vector<std::pair<std::string, Key>> table = {
      {"left", {[](RunConfig& c, const std::string& v) { c.problem.left = to_double(v); },
                [](const RunConfig& c) { return fmt(c.problem.left); }}},
      {"right", {[](RunConfig& c, const std::string& v) { c.problem.right = to_double(v); },
                 [](const RunConfig& c) { return fmt(c.problem.right); }}},
      {"flux", {[](RunConfig& c, const std::string& v) { c.problem.flux = to_list(v); },
                [](const RunConfig& c) {
                  std::string s;
                  for (double f : c.problem.flux) s += (s.empty() ? "" : ", ") + fmt(f);
                  return s;
                }}},
      {"T", {[](RunConfig& c, const std::string& v) { c.problem.T = to_double(v); },
             [](const RunConfig& c) { return fmt(c.problem.T); }}},
      {"L", {[](RunConfig& c, const std::string& v) { c.problem.L = to_double(v); },
             [](const RunConfig& c) { return fmt(c.problem.L); }}},
      {"R", {[](RunConfig& c, const std::string& v) { c.problem.R = to_double(v); },
             [](const RunConfig& c) { return fmt(c.problem.R); }}},
      {"y_min", {[](RunConfig& c, const std::string& v) { c.problem.y_min = to_double(v); },
                 [](const RunConfig& c) { return fmt(c.problem.y_min); }}},
      {"y_max", {[](RunConfig& c, const std::string& v) { c.problem.y_max = to_double(v); },
                 [](const RunConfig& c) { return fmt(c.problem.y_max); }}},
      {"order", {[](RunConfig& c, const std::string& v) { c.problem.order = to_int(v); },
                 [](const RunConfig& c) { return std::to_string(c.problem.order); }}},
      {"entropy", {[](RunConfig& c, const std::string& v) {
                     c.problem.entropy = choose<EntropyFamily>(
                         v, {{"polynomial", EntropyFamily::Polynomial}, {"kruzhkov", EntropyFamily::Kruzhkov}});
                   },
                   [](const RunConfig& c) { return to_string(c.problem.entropy); }}},
      {"k_max", {[](RunConfig& c, const std::string& v) { c.problem.k_max = to_int(v); },
                 [](const RunConfig& c) { return std::to_string(c.problem.k_max); }}},
      {"boundary", {[](RunConfig& c, const std::string& v) {
                      c.problem.boundary = choose<BoundaryImposition>(
                          v, {{"impose-left", BoundaryImposition::ImposeLeft},
                              {"impose-right", BoundaryImposition::ImposeRight},
                              {"both", BoundaryImposition::Both},
                              {"none", BoundaryImposition::None}});
                    },
                    [](const RunConfig& c) { return to_string(c.problem.boundary); }}},
      {"objective", {[](RunConfig& c, const std::string& v) {
                       c.problem.objective = choose<ObjectiveKind>(
                           v, {{"trace-min", ObjectiveKind::TraceMin}, {"entropy-max", ObjectiveKind::EntropyMax}});
                     },
                     [](const RunConfig& c) { return to_string(c.problem.objective); }}},
      {"trace_scope", {[](RunConfig& c, const std::string& v) {
                         c.problem.trace_scope = choose<TraceScope>(
                             v, {{"all", TraceScope::AllMeasures}, {"nu", TraceScope::OccupationOnly}});
                       },
                       [](const RunConfig& c) { return to_string(c.problem.trace_scope); }}},
      {"backend", {[](RunConfig& c, const std::string& v) {
                     c.solver.backend =
                         choose<Backend>(v, {{"ipm", Backend::InteriorPoint}, {"admm", Backend::Admm}});
                   },
                   [](const RunConfig& c) { return to_string(c.solver.backend); }}},
      {"max_iterations", {[](RunConfig& c, const std::string& v) { c.solver.max_iterations = to_int(v); },
                          [](const RunConfig& c) { return std::to_string(c.solver.max_iterations); }}},
      {"max_ipm_iterations",
       {[](RunConfig& c, const std::string& v) { c.solver.max_ipm_iterations = to_int(v); },
        [](const RunConfig& c) { return std::to_string(c.solver.max_ipm_iterations); }}},
      {"tol_eq", {[](RunConfig& c, const std::string& v) { c.solver.tol_eq = to_double(v); },
                  [](const RunConfig& c) { return fmt(c.solver.tol_eq); }}},
      {"tol_psd", {[](RunConfig& c, const std::string& v) { c.solver.tol_psd = to_double(v); },
                   [](const RunConfig& c) { return fmt(c.solver.tol_psd); }}},
      {"tol_gap", {[](RunConfig& c, const std::string& v) { c.solver.tol_gap = to_double(v); },
                   [](const RunConfig& c) { return fmt(c.solver.tol_gap); }}},
      {"admm_relaxation", {[](RunConfig& c, const std::string& v) { c.solver.admm_relaxation = to_double(v); },
                           [](const RunConfig& c) { return fmt(c.solver.admm_relaxation); }}},
      {"scaling_passes", {[](RunConfig& c, const std::string& v) { c.solver.scaling_passes = to_int(v); },
                          [](const RunConfig& c) { return std::to_string(c.solver.scaling_passes); }}},
      {"seed", {[](RunConfig& c, const std::string& v) {
                  const long s = to_long(v);
                  if (s < 0) throw std::invalid_argument("seed must be >= 0");
                  c.solver.seed = static_cast<unsigned>(s);
                },
                [](const RunConfig& c) { return std::to_string(c.solver.seed); }}},
      {"verbose", {[](RunConfig& c, const std::string& v) { c.solver.verbose = to_bool(v); },
                   [](const RunConfig& c) { return std::string(c.solver.verbose ? "true" : "false"); }}},
      {"epsilon", {[](RunConfig& c, const std::string& v) { c.extraction.epsilon = to_double(v); },
                   [](const RunConfig& c) { return fmt(c.extraction.epsilon); }}},
      {"grid_t", {[](RunConfig& c, const std::string& v) { c.extraction.n_t = to_int(v); },
                  [](const RunConfig& c) { return std::to_string(c.extraction.n_t); }}},
      {"grid_x", {[](RunConfig& c, const std::string& v) { c.extraction.n_x = to_int(v); },
                  [](const RunConfig& c) { return std::to_string(c.extraction.n_x); }}},
      {"grid_y", {[](RunConfig& c, const std::string& v) { c.extraction.n_y = to_int(v); },
                  [](const RunConfig& c) { return std::to_string(c.extraction.n_y); }}},
      {"beta", {[](RunConfig& c, const std::string& v) { c.extraction.beta = to_double(v); },
                [](const RunConfig& c) { return fmt(c.extraction.beta); }}},
      {"godunov_dx", {[](RunConfig& c, const std::string& v) { c.godunov_dx = to_double(v); },
                      [](const RunConfig& c) { return fmt(c.godunov_dx); }}},
      {"godunov_cfl", {[](RunConfig& c, const std::string& v) { c.godunov_cfl = to_double(v); },
                       [](const RunConfig& c) { return fmt(c.godunov_cfl); }}},
  };
  return table;
}

const Key* find_key(const std::string& name) {
  for (const auto& [k, v] : keys())
    if (k == name) return &v;
  return nullptr;
}

}  // namespace

ConfigError::ConfigError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

GodunovConfig RunConfig::godunov() const {
  GodunovConfig g;
  g.dx = godunov_dx;
  g.cfl = godunov_cfl;
  g.T = problem.T;
  g.L = problem.L;
  g.R = problem.R;
  g.left_value = problem.left;
  g.right_value = problem.right;
  g.boundary = GodunovBoundary::Inflow;
  return g;
}

RunConfig parse_config(std::istream& is) {
  struct Entry {
    int line;
    std::string key, value;
  };
  std::vector<Entry> entries;
  std::set<std::string> seen;
  std::string raw;
  for (int line = 1; std::getline(is, raw); ++line) {
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    Entry e{line, trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
    if (e.key.empty()) throw ConfigError(line, "missing key");
    if (e.value.empty()) throw ConfigError(line, "missing value for '" + e.key + "'");
    if (e.key != "case" && !find_key(e.key)) throw ConfigError(line, "unknown key '" + e.key + "'");
    if (!seen.insert(e.key).second) throw ConfigError(line, "duplicate key '" + e.key + "'");
    entries.push_back(std::move(e));
  }

  RunConfig cfg;
  for (const auto& e : entries) {
    if (e.key != "case") continue;
    if (e.value == "shock") cfg.problem = RiemannConfig::shock();
    else if (e.value == "rarefaction") cfg.problem = RiemannConfig::rarefaction();
    else throw ConfigError(e.line, "case: expected one of shock|rarefaction, got '" + e.value + "'");
  }
  for (const auto& e : entries) {
    if (e.key == "case") continue;
    try {
      find_key(e.key)->set(cfg, e.value);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(e.line, e.key + ": " + ex.what());
    }
  }
  try {
    cfg.problem.validate();
    cfg.solver.validate();
    cfg.extraction.validate();
    cfg.godunov().validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(0, ex.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
  return parse_config(in);
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : keys()) out.emplace_back(k, v.get(cfg));
  return out;
}

void write_config(std::ostream& os, const RunConfig& cfg) {
  for (const auto& [k, v] : config_entries(cfg)) os << k << " = " << v << '\n';
}

}  // namespace emv
