#include "benard/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "benard/error.hpp"

namespace benard {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::array<double, 3> to_point(const std::string& key, const std::string& v, int dim) {
  const auto xs = to_doubles(key, v);
  if (int(xs.size()) != dim) throw ConfigError(key + ": expected " + std::to_string(dim) + " coordinates");
  std::array<double, 3> p{0.5, 0.5, 0.5};
  std::copy(xs.begin(), xs.end(), p.begin());
  return p;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
  return s;
}

std::string join(const std::vector<double>& xs) {
  std::vector<std::string> s;
  for (double x : xs) s.push_back(num(x));
  return join(s);
}

const std::set<std::string> kScenarios{"decay", "threshold-sweep", "stokes-probe", "oracles", "vacuum-smoke"};

AdvectionScheme to_scheme(const std::string& v) {
  if (v == "upwind") return AdvectionScheme::Upwind;
  if (v == "muscl") return AdvectionScheme::Muscl;
  throw ConfigError("advection: expected upwind or muscl, got '" + v + "'");
}

MuAverage to_average(const std::string& v) {
  if (v == "arithmetic") return MuAverage::Arithmetic;
  if (v == "harmonic") return MuAverage::Harmonic;
  throw ConfigError("mu_average: expected arithmetic or harmonic, got '" + v + "'");
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (map.count(key)) throw ConfigError("duplicate key: " + key);
    map[key] = value;
  }
  return map;
}

ViscosityLaw SimConfig::law() const {
  if (mu_law == "tabulated") return ViscosityLaw::tabulated(mu_table, rho_bar, mu_min, mu_max);
  return ViscosityLaw::affine(mu_a, mu_b, rho_bar, mu_min, mu_max);
}

SimConfig build_config(const ConfigMap& raw) {
  SimConfig c;
  c.raw = raw;
  std::set<std::string> used;
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    used.insert(key);
    const auto it = raw.find(key);
    if (it == raw.end()) return std::nullopt;
    return it->second;
  };
  auto require = [&](const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError("missing key: " + key);
    return *v;
  };
  auto opt_double = [&](const std::string& key, double& dst) {
    if (auto v = get(key)) dst = to_double(key, *v);
  };

  c.scenario = require("scenario");
  if (!kScenarios.count(c.scenario)) throw ConfigError("scenario: unknown scenario '" + c.scenario + "'");

  const auto dim = to_int("dim", require("dim"));
  if (dim != 2 && dim != 3) throw ConfigError("dim: must be 2 or 3");
  c.grid.dim = int(dim);
  const char* cell_keys[] = {"nx", "ny", "nz"};
  const char* length_keys[] = {"lx", "ly", "lz"};
  for (int a = 0; a < c.grid.dim; ++a) {
    c.grid.cells[a] = int(to_int(cell_keys[a], require(cell_keys[a])));
    c.grid.lengths[a] = to_double(length_keys[a], require(length_keys[a]));
  }
  c.kappa = to_double("kappa", require("kappa"));
  c.q = to_double("q", require("q"));
  c.r = to_double("r", require("r"));
  c.t_end = to_double("t_end", require("t_end"));

  if (!(c.q > 3.0)) throw HypothesisError("q = " + num(c.q) + " violates the theorem hypothesis q > 3");
  if (!(c.r > 3.0 && c.r < std::min(c.q, 6.0)))
    throw HypothesisError("r = " + num(c.r) + " violates the theorem hypothesis 3 < r < min{q, 6}");
  if (!(c.t_end > 0.0)) throw ConfigError("t_end: must be positive");
  if (!(c.kappa > 0.0)) throw ConfigError("kappa: must be positive");

  if (auto v = get("mu_law")) c.mu_law = *v;
  if (c.mu_law != "affine" && c.mu_law != "tabulated")
    throw ConfigError("mu_law: expected affine or tabulated, got '" + c.mu_law + "'");
  opt_double("mu_a", c.mu_a);
  opt_double("mu_b", c.mu_b);
  if (auto v = get("mu_table")) c.mu_table = to_doubles("mu_table", *v);
  if (c.mu_law == "tabulated" && c.mu_table.size() < 2) throw ConfigError("mu_table: need at least two values");
  if (auto v = get("mu_min")) c.mu_min = to_double("mu_min", *v);
  if (auto v = get("mu_max")) c.mu_max = to_double("mu_max", *v);

  opt_double("rho_bar", c.rho_bar);
  opt_double("rho_background", c.rho_background);
  if (!(c.rho_bar > 0.0)) throw ConfigError("rho_bar: must be positive");
  if (!(c.rho_background >= 0.0)) throw ConfigError("rho_background: must be non-negative");
  if (c.rho_background > c.rho_bar) throw ConfigError("rho_background: exceeds rho_bar");
  for (int a = 0; a < 3; ++a) c.blob_center[a] = 0.5 * c.grid.lengths[a];
  if (auto v = get("blob_center")) c.blob_center = to_point("blob_center", *v, c.grid.dim);
  opt_double("m0_radius", c.m0_radius);
  opt_double("blob_edge", c.blob_edge);
  if (!(c.m0_radius >= 0.0)) throw ConfigError("m0_radius: must be non-negative");
  if (!(c.blob_edge > 0.0)) throw ConfigError("blob_edge: must be positive");
  opt_double("u_amplitude", c.u_amplitude);
  opt_double("theta_amplitude", c.theta_amplitude);
  if (auto v = get("theta_modes")) c.theta_modes = int(to_int("theta_modes", *v));
  if (c.theta_modes < 1) throw ConfigError("theta_modes: must be at least 1");
  if (auto v = get("seed")) c.seed = std::uint64_t(to_int("seed", *v));
  if (auto v = get("vacuum_center")) c.vacuum_center = to_point("vacuum_center", *v, c.grid.dim);
  opt_double("vacuum_radius", c.vacuum_radius);

  opt_double("dt_fixed", c.dt_fixed);
  opt_double("output_interval", c.output_interval);
  opt_double("checkpoint_interval", c.checkpoint_interval);
  if (c.dt_fixed < 0.0) throw ConfigError("dt_fixed: must be non-negative");
  if (c.output_interval < 0.0) throw ConfigError("output_interval: must be non-negative");
  opt_double("cfl", c.step.cfl);
  opt_double("dt_max", c.step.dt_max);
  if (!(c.step.cfl > 0.0)) throw ConfigError("cfl: must be positive");
  if (!(c.step.dt_max > 0.0)) throw ConfigError("dt_max: must be positive");
  opt_double("projection_tol", c.step.projection_tol);
  opt_double("momentum_tol", c.step.momentum_tol);
  opt_double("thermal_tol", c.step.thermal_tol);
  opt_double("eps_rho", c.step.eps_rho);
  opt_double("step_doubling_tol", c.step.step_doubling_tol);
  if (auto v = get("buoyancy")) c.step.buoyancy = to_bool("buoyancy", *v);
  if (auto v = get("heat_source")) c.step.heat_source = to_bool("heat_source", *v);
  if (auto v = get("freeze_velocity")) c.step.freeze_velocity = to_bool("freeze_velocity", *v);
  if (auto v = get("advection")) c.step.advection = to_scheme(*v);
  if (auto v = get("mu_average")) c.step.average = to_average(*v);
  c.step.rho_bar = c.rho_bar;

  opt_double("slack_abs", c.slack.absolute);
  opt_double("slack_rel", c.slack.relative);
  opt_double("energy_slack", c.energy_slack);
  if (auto v = get("C1")) {
    c.C1 = to_double("C1", *v);
    if (!(*c.C1 > 0.0)) throw ConfigError("C1: must be positive");
  }
  opt_double("decay_factor", c.decay_factor);

  opt_double("stokes_mu_amplitude", c.stokes_mu_amplitude);
  if (auto v = get("probe_count")) c.probe_count = int(to_int("probe_count", *v));
  if (auto v = get("sweep_key")) c.sweep_key = *v;
  if (auto v = get("sweep_values")) c.sweep_values = split_list(*v);
  if (auto v = get("out")) c.out_dir = *v;

  for (const auto& [k, v] : raw)
    if (!used.count(k)) throw ConfigError("unknown key: " + k);

  build_grid(c.grid);
  (void)c.law();
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return build_config(parse_config_text(ss.str()));
}

std::string resolved_config_text(const SimConfig& c) {
  std::vector<std::pair<std::string, std::string>> kv;
  auto put = [&](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
  put("scenario", c.scenario);
  put("dim", std::to_string(c.grid.dim));
  const char* cell_keys[] = {"nx", "ny", "nz"};
  const char* length_keys[] = {"lx", "ly", "lz"};
  for (int a = 0; a < c.grid.dim; ++a) {
    put(cell_keys[a], std::to_string(c.grid.cells[a]));
    put(length_keys[a], num(c.grid.lengths[a]));
  }
  put("kappa", num(c.kappa));
  put("q", num(c.q));
  put("r", num(c.r));
  put("t_end", num(c.t_end));
  put("mu_law", c.mu_law);
  put("mu_a", num(c.mu_a));
  put("mu_b", num(c.mu_b));
  if (!c.mu_table.empty()) put("mu_table", join(c.mu_table));
  const ViscosityLaw law = c.law();
  put("mu_min", num(law.mu_min()));
  put("mu_max", num(law.mu_max()));
  put("rho_bar", num(c.rho_bar));
  put("rho_background", num(c.rho_background));
  put("blob_center", join(std::vector<double>(c.blob_center.begin(), c.blob_center.begin() + c.grid.dim)));
  put("m0_radius", num(c.m0_radius));
  put("blob_edge", num(c.blob_edge));
  put("u_amplitude", num(c.u_amplitude));
  put("theta_amplitude", num(c.theta_amplitude));
  put("theta_modes", std::to_string(c.theta_modes));
  put("seed", std::to_string(c.seed));
  if (c.vacuum_center)
    put("vacuum_center", join(std::vector<double>(c.vacuum_center->begin(), c.vacuum_center->begin() + c.grid.dim)));
  put("vacuum_radius", num(c.vacuum_radius));
  put("dt_fixed", num(c.dt_fixed));
  put("output_interval", num(c.output_interval));
  put("checkpoint_interval", num(c.checkpoint_interval));
  put("cfl", num(c.step.cfl));
  put("dt_max", num(c.step.dt_max));
  put("projection_tol", num(c.step.projection_tol));
  put("momentum_tol", num(c.step.momentum_tol));
  put("thermal_tol", num(c.step.thermal_tol));
  put("eps_rho", num(c.step.eps_rho));
  put("step_doubling_tol", num(c.step.step_doubling_tol));
  put("buoyancy", c.step.buoyancy ? "true" : "false");
  put("heat_source", c.step.heat_source ? "true" : "false");
  put("freeze_velocity", c.step.freeze_velocity ? "true" : "false");
  put("advection", c.step.advection == AdvectionScheme::Upwind ? "upwind" : "muscl");
  put("mu_average", c.step.average == MuAverage::Arithmetic ? "arithmetic" : "harmonic");
  put("slack_abs", num(c.slack.absolute));
  put("slack_rel", num(c.slack.relative));
  put("energy_slack", num(c.energy_slack));
  if (c.C1) put("C1", num(*c.C1));
  put("decay_factor", num(c.decay_factor));
  put("stokes_mu_amplitude", num(c.stokes_mu_amplitude));
  put("probe_count", std::to_string(c.probe_count));
  put("sweep_key", c.sweep_key);
  if (!c.sweep_values.empty()) put("sweep_values", join(c.sweep_values));
  put("out", c.out_dir.string());
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  if (!c.C1) out += "# C1 not set: the run's sup of c1_ratio is used\n";
  return out;
}

}  // namespace benard
