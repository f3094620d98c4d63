#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "benard/grid.hpp"
#include "benard/ledger.hpp"
#include "benard/stepper.hpp"
#include "benard/transport.hpp"

namespace benard {

/// Raw `key = value` pairs in file order of first appearance.
using ConfigMap = std::map<std::string, std::string>;

struct SimConfig {
  std::string scenario;
  GridSettings grid;

  std::string mu_law = "affine";  ///< affine | tabulated
  double mu_a = 1.0;
  double mu_b = 1.0;
  std::vector<double> mu_table;
  std::optional<double> mu_min;
  std::optional<double> mu_max;

  double kappa = 1.0;
  double q = 4.0;
  double r = 3.5;

  // initial data
  double rho_bar = 1.0;  ///< blob height
  double rho_background = 0.05;
  std::array<double, 3> blob_center{0.5, 0.5, 0.5};
  double m0_radius = 0.15;
  double blob_edge = 0.02;
  double u_amplitude = 1.0;
  double theta_amplitude = 1.0;
  int theta_modes = 2;
  std::uint64_t seed = 1;
  std::optional<std::array<double, 3>> vacuum_center;
  double vacuum_radius = 0.0;

  // time stepping
  double t_end = 1.0;
  double dt_fixed = 0.0;  ///< > 0 replaces the CFL-controlled step
  double output_interval = 0.0;  ///< 0: every step
  double checkpoint_interval = 0.0;  ///< 0: final state only
  StepConfig step;

  // ledger
  Slack slack;
  double energy_slack = 1e-10;
  std::optional<double> C1;
  double decay_factor = 0.9;

  // stokes probe and sweeps
  double stokes_mu_amplitude = 0.5;
  int probe_count = 100;
  std::string sweep_key = "m0_radius";
  std::vector<std::string> sweep_values;

  std::filesystem::path out_dir = "out";
  ConfigMap raw;  ///< as given, for sweeps and echoing

  ViscosityLaw law() const;
  Grid build() const { return build_grid(grid); }
};

ConfigMap parse_config_text(const std::string& text);
/// Validates and fills defaults. Throws ConfigError ("missing key: t_end",
/// unknown keys, malformed values) or HypothesisError for q and r.
SimConfig build_config(const ConfigMap& raw);
SimConfig load_config(const std::filesystem::path& path);

/// Every key with its effective value, one `key = value` per line.
std::string resolved_config_text(const SimConfig& config);

std::vector<std::string> split_list(const std::string& text);

}  // namespace benard
