#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chemo1d/expr.hpp"
#include "chemo1d/schemes.hpp"

namespace chemo1d {

/// Declarative description of one run: scheme, grid, horizon, physics, solver
/// knobs, and the initial data as expressions in x.
struct RunConfig {
  std::string preset;  // empty unless built from / based on a preset
  SchemeId scheme = SchemeId::uv;
  double a = 0.0;
  double b = 1.0;
  double h = 0.0;     // exactly one of h / num_nodes must be set
  int num_nodes = 0;
  double dt = 0.0;
  double T = 0.0;
  double chi = 1.0;
  double mu = 1.0;
  double eps = 0.0;   // 0 -> defaults to h^2 at resolution time
  double c_tol = 1e-8;
  int max_iter = 100;
  std::optional<bool> carry_forward;  // unset -> per-scheme default
  double v_floor = 1e-300;
  std::string u0_expr;
  std::string v0_expr;
  std::vector<double> snapshot_times;  // empty -> log-spaced default
};

inline std::vector<std::string> presets() {
  return {"example-i", "example-ii", "example-iii", "example-iv"};
}

/// The four built-in experiment configurations. Initial data, horizon, and
/// physical parameters are fixed; h and dt carry runnable defaults that the
/// CLI can override.
inline RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "example-i") {
    c.u0_expr = "1.0001 + cos(5*pi*x)";
    c.v0_expr = "1.0001 + cos(2*pi*x)";
    c.T = 0.3;
    c.chi = 100.0;
    c.mu = 1000.0;
    c.h = 1e-3;
    c.dt = 1e-6;
  } else if (name == "example-ii") {
    c.u0_expr = "1.1 - exp(-((x-0.5)/0.1)^2)";
    c.v0_expr = "2 - exp(-((x-0.5)/0.01)^2)";
    c.T = 1e-4;
    c.chi = 100.0;
    c.mu = 1.0;
    c.h = 1e-3;
    c.dt = 1e-8;
  } else if (name == "example-iii") {
    c.u0_expr = "4*(2.0001 + cos(7*pi*x))";
    c.v0_expr = "3*(2.0001 + cos(12*pi*x))";
    c.T = 1e-4;
    c.chi = 30.0;
    c.mu = 10000.0;
    c.h = 1e-3;
    c.dt = 1e-8;
  } else if (name == "example-iv") {
    c.u0_expr = "3*(1.0001 + cos(8*pi*x))";
    c.v0_expr = "5*(1.0001 + cos(7*pi*x))";
    c.T = 1e-4;
    c.chi = 10.0;
    c.mu = 1500.0;
    c.h = 1e-3;
    c.dt = 1e-7;
  } else {
    throw ConfigError("unknown preset '" + name +
                      "' (available: example-i, example-ii, example-iii, "
                      "example-iv)");
  }
  return c;
}

namespace detail {

inline double parse_double(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ConfigError("config: key '" + key + "': cannot parse '" + value +
                      "' as a number");
  return v;
}

inline int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("config: key '" + key + "': '" + value +
                      "' is not an integer");
  return i;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw ConfigError("config: key '" + key + "': cannot parse '" + value +
                    "' as a boolean (true/false)");
}

inline std::vector<double> parse_double_list(const std::string& key,
                                             const std::string& value) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(key, tok));
  if (out.empty())
    throw ConfigError("config: key '" + key + "': empty list");
  return out;
}

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Applies one key = value pair; throws ConfigError on unknown keys.
inline void apply_key(RunConfig& c, const std::string& key,
                      const std::string& value) {
  if (key == "preset") return;  // handled in a first pass
  if (key == "scheme") c.scheme = scheme_from_string(value);
  else if (key == "a") c.a = parse_double(key, value);
  else if (key == "b") c.b = parse_double(key, value);
  else if (key == "h") c.h = parse_double(key, value);
  else if (key == "num_nodes") c.num_nodes = parse_int(key, value);
  else if (key == "dt") c.dt = parse_double(key, value);
  else if (key == "T") c.T = parse_double(key, value);
  else if (key == "chi") c.chi = parse_double(key, value);
  else if (key == "mu") c.mu = parse_double(key, value);
  else if (key == "eps") c.eps = parse_double(key, value);
  else if (key == "c_tol") c.c_tol = parse_double(key, value);
  else if (key == "max_iter") c.max_iter = parse_int(key, value);
  else if (key == "carry_forward_on_cap") c.carry_forward = parse_bool(key, value);
  else if (key == "v_floor") c.v_floor = parse_double(key, value);
  else if (key == "u0") c.u0_expr = value;
  else if (key == "v0") c.v0_expr = value;
  else if (key == "snapshot_times") c.snapshot_times = parse_double_list(key, value);
  else
    throw ConfigError("config: unknown key '" + key + "'");
}

}  // namespace detail

/// Parses a `key = value` configuration file with '#' comments. A `preset`
/// key (anywhere in the file) seeds the configuration before the remaining
/// keys override it.
inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");

  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                        ": empty key or value");
    pairs.emplace_back(key, value);
  }

  RunConfig c;
  for (const auto& [key, value] : pairs)
    if (key == "preset") c = preset_config(value);
  for (const auto& [key, value] : pairs) detail::apply_key(c, key, value);
  return c;
}

/// A RunConfig resolved against a concrete mesh: initial fields built, eps
/// defaulted, all invariants checked.
struct ResolvedConfig {
  RunConfig cfg;
  Mesh1D mesh;
  NodalField u0;
  NodalField v0;
  PhysicalParams physics;
  SolverParams solver;
  std::vector<double> snapshot_times;
};

namespace detail {

/// Default snapshot frames: t = 0 plus seven log-spaced times ending at T.
inline std::vector<double> default_snapshot_times(double T) {
  std::vector<double> ts{0.0};
  for (int k = -6; k <= 0; ++k) ts.push_back(T * std::pow(10.0, k));
  return ts;
}

}  // namespace detail

inline ResolvedConfig resolve(const RunConfig& cfg) {
  if (!(cfg.b > cfg.a))
    throw ConfigError("config: domain requires b > a");
  int num_nodes = cfg.num_nodes;
  if (cfg.h > 0.0) {
    const double cells = (cfg.b - cfg.a) / cfg.h;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells) || rounded < 1)
      throw ConfigError("config: h must divide the domain into a whole "
                        "number of cells");
    const int from_h = static_cast<int>(rounded) + 1;
    if (num_nodes != 0 && num_nodes != from_h)
      throw ConfigError("config: h and num_nodes disagree");
    num_nodes = from_h;
  }
  if (num_nodes < 2)
    throw ConfigError("config: set h or num_nodes (need at least 2 nodes)");
  if (!(cfg.T > 0.0)) throw ConfigError("config: T must be positive");
  if (!(cfg.chi >= 0.0) || !(cfg.mu >= 0.0))
    throw ConfigError("config: chi and mu must be nonnegative");
  if (cfg.u0_expr.empty() || cfg.v0_expr.empty())
    throw ConfigError("config: u0 and v0 expressions are required");

  ResolvedConfig r{cfg,
                   Mesh1D::uniform(cfg.a, cfg.b, num_nodes),
                   NodalField(),
                   NodalField(),
                   PhysicalParams{cfg.chi, cfg.mu},
                   SolverParams{},
                   {}};
  const Expr u0e = Expr::parse(cfg.u0_expr);
  const Expr v0e = Expr::parse(cfg.v0_expr);
  r.u0 = interpolate(r.mesh, [&](double x) { return u0e(x); });
  r.v0 = interpolate(r.mesh, [&](double x) { return v0e(x); });
  if (!all_finite(r.u0) || !all_finite(r.v0))
    throw ConfigError("config: initial data evaluates to non-finite values");

  r.solver.dt = cfg.dt;
  r.solver.eps = cfg.eps > 0.0 ? cfg.eps : r.mesh.h * r.mesh.h;
  r.solver.c_tol = cfg.c_tol;
  r.solver.max_iter = cfg.max_iter;
  r.solver.carry_forward_on_cap =
      cfg.carry_forward ? *cfg.carry_forward : default_carry_forward(cfg.scheme);
  r.solver.v_floor = cfg.v_floor;
  r.solver.validate(cfg.scheme);

  r.snapshot_times = cfg.snapshot_times.empty()
                         ? detail::default_snapshot_times(cfg.T)
                         : cfg.snapshot_times;
  std::sort(r.snapshot_times.begin(), r.snapshot_times.end());
  for (double t : r.snapshot_times)
    if (t < 0.0 || t > cfg.T * (1.0 + 1e-12))
      throw ConfigError("config: snapshot times must lie in [0, T]");
  return r;
}

}  // namespace chemo1d
