#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "benard/config.hpp"
#include "benard/ledger.hpp"
#include "benard/stepper.hpp"

namespace benard {

/// Everything a finished time-dependent run produced.
struct Simulation {
  std::vector<LedgerRow> rows;
  RateParams params;
  double grad_mu_0 = 0.0;
  FluidState final_state;
  std::vector<FluidState> checkpoints;
  int steps = 0;
  int halvings = 0;
  double max_div_residual = 0.0;
  double mass_drift = 0.0;  ///< worst relative L^1 drift over all steps
  double rho0_min = 0.0, rho0_max = 0.0;
  double rho_min = 0.0, rho_max = 0.0;
  bool finite = true;
};

/// Runs the configured initial data to t_end. Ledger rows are taken at
/// t = 0, then every output_interval (every step when it is 0).
Simulation simulate(const SimConfig& config);

/// Verdicts of a decay-type run: monotone energy, decay rate (when t_end > 1), Gronwall bound
/// on grad mu, the four bootstrap checks, weighted-series tail, mass and max
/// principle.
std::vector<Verdict> decay_verdicts(const Simulation& sim, const SimConfig& config);

/// Stability-only verdicts (vacuum runs).
std::vector<Verdict> stability_verdicts(const Simulation& sim, const SimConfig& config);

using Summary = std::vector<std::pair<std::string, std::string>>;

Summary simulation_summary(const Simulation& sim, const SimConfig& config);

struct ScenarioResult {
  std::vector<Verdict> verdicts;
  Summary summary;
  std::vector<LedgerRow> rows;

  bool all_hold() const;
};

/// Runs `config.scenario` and writes ledger.csv, verdicts.txt, summary.txt,
/// resolved_config.txt and checkpoints under `out_dir`.
ScenarioResult run_scenario(const SimConfig& config, const std::filesystem::path& out_dir);

struct SweepPoint {
  std::string value;
  double m0 = 0.0;
  double sup_c1_ratio = 0.0;
  double sup_coupling = 0.0;  ///< sup |B| / (||grad u|| ||grad theta||)
  double scaled = 0.0;        ///< sup_coupling / m0^(2/3)
  bool monotone_energy = false;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<Verdict> verdicts;
};

/// One decay run per value of `key`, dispatched over `threads` workers;
/// each run writes into out_dir/<key>_<value>. Writes sweep.csv.
SweepResult run_sweep(const ConfigMap& base, const std::string& key, const std::vector<std::string>& values,
                      const std::filesystem::path& out_dir, int threads);

/// Worker count: BENARD_THREADS when set, else the hardware concurrency.
int worker_threads();

void write_summary(const Summary& summary, const std::filesystem::path& path);

}  // namespace benard
