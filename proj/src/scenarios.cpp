#include "benard/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <thread>

#include "benard/error.hpp"
#include "benard/inequalities.hpp"
#include "benard/initial.hpp"
#include "benard/operators.hpp"
#include "benard/oracles.hpp"
#include "benard/stokes.hpp"

namespace benard {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Verdict margin_verdict(std::string name, double margin, std::optional<double> t = {}) {
  Verdict v;
  v.name = std::move(name);
  v.margin = margin;
  v.holds = margin >= 0.0;
  if (!v.holds) v.first_violation_t = t ? t : std::optional<double>(0.0);
  return v;
}

double max_principle_tol(const SimConfig& c) {
  return c.step.advection == AdvectionScheme::Upwind ? 1e-10 : 1e-6;
}

double courant_limit(AdvectionScheme s) { return s == AdvectionScheme::Upwind ? 1.0 : 0.5; }

bool state_finite(const FluidState& s) {
  bool ok = s.rho.values().allFinite() && s.theta.values().allFinite() && s.P.values().allFinite();
  for (int a = 0; a < s.u.dim(); ++a) ok = ok && s.u.component(a).allFinite();
  return ok;
}

}  // namespace

bool ScenarioResult::all_hold() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.holds; });
}

Simulation simulate(const SimConfig& c) {
  Simulation sim;
  const Grid grid = c.build();
  const ViscosityLaw law = c.law();
  FluidState s = initial_state(c);

  const MassMoments mm0 = mass_moments(s.rho);
  sim.rho0_min = sim.rho_min = mm0.rho_min;
  sim.rho0_max = sim.rho_max = mm0.rho_max;
  sim.params = sigma_and_threshold(law.mu_min(), c.kappa, mm0.rho_max, grid.diameter(), c.C1.value_or(1.0));
  sim.params.m0 = mm0.m0;
  sim.params.q = c.q;

  const Stepper stepper(grid, law, c.kappa, c.step);
  sim.rows.push_back(ledger_row(s, nullptr, law, sim.params, c.step.average));
  sim.grad_mu_0 = sim.rows.front().grad_mu_lq;

  const double eps = 1e-12 * c.t_end;
  double next_out = c.output_interval;
  double next_ck = c.checkpoint_interval;
  const double limit = 0.9 * courant_limit(c.step.advection);
  while (s.t < c.t_end - eps) {
    double dt = c.dt_fixed > 0.0 ? c.dt_fixed : stable_dt(s, c.step);
    dt = std::min(dt, c.t_end - s.t);
    // Keep the transport step inside its monotone range in every dimension.
    const double courant = outflow_courant(s.u, dt);
    if (courant > limit) dt *= limit / courant;

    auto [next, report] = stepper.controlled_step(s, dt);
    ++sim.steps;
    sim.halvings += report.halvings;
    sim.max_div_residual = std::max(sim.max_div_residual, report.div_residual);
    const double m = next.rho.values().sum() * grid.cell_volume();
    sim.mass_drift = std::max(sim.mass_drift, mm0.m0 > 0.0 ? std::abs(m - mm0.m0) / mm0.m0 : std::abs(m));
    sim.rho_min = std::min(sim.rho_min, next.rho.values().minCoeff());
    sim.rho_max = std::max(sim.rho_max, next.rho.values().maxCoeff());
    sim.finite = sim.finite && state_finite(next);
    if (!sim.finite) throw StabilityError("simulate: non-finite state at t = " + num(next.t));

    const bool last = next.t >= c.t_end - eps;
    if (c.output_interval <= 0.0 || next.t >= next_out - eps || last) {
      sim.rows.push_back(ledger_row(next, &s, law, sim.params, c.step.average));
      while (c.output_interval > 0.0 && next_out <= next.t + eps) next_out += c.output_interval;
    }
    if (c.checkpoint_interval > 0.0 && next.t >= next_ck - eps && !last) {
      sim.checkpoints.push_back(next);
      while (next_ck <= next.t + eps) next_ck += c.checkpoint_interval;
    }
    s = std::move(next);
  }
  sim.checkpoints.push_back(s);

  if (!c.C1) {
    double sup = 0.0;
    for (const auto& r : sim.rows) sup = std::max(sup, r.c1_ratio);
    if (sup > 0.0) {
      const double m0 = sim.params.m0, q = sim.params.q;
      sim.params = sigma_and_threshold(law.mu_min(), c.kappa, mm0.rho_max, grid.diameter(), sup);
      sim.params.m0 = m0;
      sim.params.q = q;
    }
  }
  sim.final_state = s;
  return sim;
}

std::vector<Verdict> decay_verdicts(const Simulation& sim, const SimConfig& c) {
  std::vector<Verdict> v;
  v.push_back(monotone_energy_verdict(sim.rows, c.energy_slack));
  // The fit window [zeta(T), T] is empty until T exceeds 1.
  if (sim.rows.back().t > 1.0) v.push_back(decay_rate_verdict(sim.rows, sim.params, c.decay_factor));
  v.push_back(gronwall_mu_verdict(sim.rows, c.slack));
  const auto b = bootstrap_monitor(sim.rows, sim.params, sim.grad_mu_0, c.slack);
  v.push_back(b.grad_mu_4x);
  v.push_back(b.grad_u4_2m0);
  v.push_back(b.grad_mu_2x);
  v.push_back(b.grad_u4_m0);
  v.push_back(weighted_series(sim.rows, sim.params, c.slack).bounded);
  auto more = stability_verdicts(sim, c);
  v.insert(v.end(), more.begin(), more.end());
  return v;
}

std::vector<Verdict> stability_verdicts(const Simulation& sim, const SimConfig& c) {
  std::vector<Verdict> v;
  v.push_back(margin_verdict("finite_state", sim.finite ? 1.0 : -1.0));
  v.push_back(margin_verdict("mass_conservation", 1e-12 - sim.mass_drift, sim.rows.back().t));
  const double tol = max_principle_tol(c);
  v.push_back(margin_verdict("max_principle",
                             std::min(sim.rho_min - (sim.rho0_min - tol), (sim.rho0_max + tol) - sim.rho_max),
                             sim.rows.back().t));
  return v;
}

Summary simulation_summary(const Simulation& sim, const SimConfig& c) {
  Summary s;
  auto put = [&](std::string k, double x) { s.emplace_back(std::move(k), num(x)); };
  const auto& p = sim.params;
  put("steps", sim.steps);
  put("step_halvings", sim.halvings);
  put("t_end", sim.rows.back().t);
  put("m0", p.m0);
  put("rho_bar", p.rho_bar);
  put("mu_lower", p.mu_lower);
  put("kappa", p.kappa);
  put("diameter", p.diameter);
  put("sigma", p.sigma);
  s.emplace_back("C1_source", c.C1 ? "config" : "empirical_sup_c1_ratio");
  put("C1", p.C1);
  put("m0_threshold", p.threshold);
  put("m0_threshold_band_low", 0.25 * p.threshold);
  put("m0_threshold_band_high", p.threshold);
  s.emplace_back("m0_below_threshold", p.m0 < p.threshold ? "true" : "false");
  double sup_c1 = 0.0;
  for (const auto& r : sim.rows) sup_c1 = std::max(sup_c1, r.c1_ratio);
  put("sup_c1_ratio", sup_c1);
  const double T = sim.rows.back().t;
  if (sim.rows.size() >= 2) {
    try {
      put("decay_rate", fit_decay_rate(sim.rows, RateParams::zeta(T), T));
    } catch (const Error&) {
      s.emplace_back("decay_rate", "nan");
    }
    put("energy_residual_rms", rms(energy_identity_residual(sim.rows)));
  }
  put("grad_mu_0", sim.grad_mu_0);
  put("max_div_residual", sim.max_div_residual);
  put("mass_drift", sim.mass_drift);
  put("rho_min", sim.rho_min);
  put("rho_max", sim.rho_max);
  for (const auto& [k, x] : weighted_series(sim.rows, sim.params, c.slack).values) put(k, x);
  return s;
}

void write_summary(const Summary& summary, const std::filesystem::path& path) {
  std::string out;
  for (const auto& [k, v] : summary) out += k + " = " + v + "\n";
  write_atomic(path, out);
}

namespace {

void write_run(const std::filesystem::path& dir, const SimConfig& c, const ScenarioResult& r,
               const std::vector<FluidState>& checkpoints) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_atomic(dir / "resolved_config.txt", resolved_config_text(c));
  write_ledger_csv(r.rows, dir / "ledger.csv");
  write_verdicts(r.verdicts, dir / "verdicts.txt");
  write_summary(r.summary, dir / "summary.txt");
  if (!checkpoints.empty()) {
    std::filesystem::create_directories(dir / "checkpoints", ec);
    if (ec) throw IoError("cannot create checkpoints directory: " + ec.message());
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "state_%04zu.bin", i);
      write_checkpoint(checkpoints[i], dir / "checkpoints" / name);
    }
  }
}

ScenarioResult oracle_scenario(const SimConfig& c) {
  ScenarioResult r;
  const int n = c.grid.cells[0];
  auto put = [&](std::string k, double x) { r.summary.emplace_back(std::move(k), num(x)); };

  const HeatOracle heat = heat_oracle(n);
  put("heat_rate", heat.rate);
  put("heat_expected", heat.expected);
  r.verdicts.push_back(margin_verdict("heat_decay_rate", 0.02 - heat.rel_error));

  const RotationOracle rot = rotation_oracle(n, 0.5);
  put("rotation_steps", rot.steps);
  put("rotation_mass_drift", rot.mass_drift);
  put("rotation_shape_l1_error", rot.shape_l1_error);
  put("rotation_centroid_error", rot.centroid_error);
  r.verdicts.push_back(margin_verdict("rotation_mass", 1e-12 - rot.mass_drift));
  r.verdicts.push_back(margin_verdict(
      "rotation_max_principle", std::min(rot.rho_min - rot.rho0_min + 1e-10, rot.rho0_max + 1e-10 - rot.rho_max)));

  const std::vector<int> levels{std::max(4, n / 4), std::max(4, n / 2), n};
  for (double amp : {0.0, c.stokes_mu_amplitude}) {
    const auto conv = stokes_convergence(amp, levels, c.q);
    const std::string tag = amp == 0.0 ? "constant_mu" : "variable_mu";
    put("stokes_order_" + tag, conv.min_order());
    put("stokes_probe_drift_" + tag, conv.probe_drift());
    r.verdicts.push_back(margin_verdict("stokes_order_" + tag, conv.min_order() - 1.9));
    r.verdicts.push_back(margin_verdict("stokes_probe_stable_" + tag, 0.1 - conv.probe_drift()));
  }

  const Grid fine = build_grid({2, {n, n, 1}, {1.0, 1.0, 1.0}});
  const Grid coarse = build_grid({2, {std::max(4, n / 2), std::max(4, n / 2), 1}, {1.0, 1.0, 1.0}});
  const std::vector<double> ps{2.0, 4.0, 6.0};
  const auto pf = run_probe_suite(fine, c.probe_count, c.seed, ps);
  const auto pc = run_probe_suite(coarse, c.probe_count, c.seed, ps);
  put("poincare_max_ratio", pf.max_poincare);
  put("poincare_bound", fine.diameter());
  r.verdicts.push_back(margin_verdict("poincare_bound", pf.poincare_all_satisfied ? fine.diameter() - pf.max_poincare : -1.0));
  r.verdicts.push_back(margin_verdict("gn_p2_identity", 1e-12 - pf.gn2_max_deviation));
  for (double p : {4.0, 6.0}) {
    double drift = 0.0;
    const auto& a = pc.gn_ratios.at(p);
    const auto& b = pf.gn_ratios.at(p);
    for (std::size_t i = 0; i < a.size(); ++i) drift = std::max(drift, std::abs(b[i] / a[i] - 1.0));
    const std::string tag = "gn_refinement_p" + std::to_string(int(p));
    put(tag, drift);
    put("gn_constant_p" + std::to_string(int(p)), pf.gn_max.at(p));
    r.verdicts.push_back(margin_verdict(tag, 0.05 - drift));
  }
  return r;
}

ScenarioResult stokes_probe_scenario(const SimConfig& c) {
  ScenarioResult r;
  auto put = [&](std::string k, double x) { r.summary.emplace_back(std::move(k), num(x)); };
  const FluidState s0 = initial_state(c);
  const Grid& grid = s0.grid();
  StokesProblem pb;
  pb.mu = viscosity_field(s0.rho, c.law());
  pb.forcing = VectorField(grid, VelocityBoundary::None);
  ScalarField rho_theta = s0.rho;
  rho_theta.values() *= s0.theta.values();
  pb.forcing.component(grid.vertical_axis()) = face_average(rho_theta, grid.vertical_axis());
  StokesOptions opt;
  opt.average = c.step.average;
  const StokesSolution sol = solve_stokes(pb, opt);
  const RegularityProbe probe = regularity_probe(pb, sol, c.q, c.r);
  put("buoyancy_iterations", sol.iterations);
  put("buoyancy_residual", sol.residual);
  put("buoyancy_ratio", probe.ratio);
  put("buoyancy_ratio_with_pressure", probe.ratio_with_pressure);
  put("buoyancy_ratio_with_pressure_over_mu", probe.ratio_with_pressure_over_mu);
  put("buoyancy_ratio_r", probe.ratio_r.value_or(std::nan("")));
  put("buoyancy_u_h2", probe.u_h2);
  put("buoyancy_forcing_l2", probe.forcing_l2);
  put("buoyancy_grad_mu_lq", probe.grad_mu_lq);
  r.verdicts.push_back(margin_verdict("stokes_converged", opt.tol - sol.residual));
  r.verdicts.push_back(margin_verdict("regularity_ratio_finite", std::isfinite(probe.ratio) ? 1.0 : -1.0));

  if (grid.dim() == 2) {
    const int n = grid.cells(0);
    const auto conv = stokes_convergence(c.stokes_mu_amplitude, {std::max(4, n / 2), n}, c.q, opt);
    for (const auto& lv : conv.levels) {
      const std::string tag = "manufactured_" + std::to_string(lv.cells);
      put(tag + "_u_error", lv.u_error);
      put(tag + "_ratio", lv.probe.ratio);
      put(tag + "_ratio_with_pressure", lv.probe.ratio_with_pressure);
      put(tag + "_ratio_with_pressure_over_mu", lv.probe.ratio_with_pressure_over_mu);
    }
    r.verdicts.push_back(margin_verdict("regularity_ratio_stable", 0.1 - conv.probe_drift()));
  }
  return r;
}

ScenarioResult sweep_scenario(const SimConfig& c, const std::filesystem::path& out_dir) {
  std::vector<std::string> values = c.sweep_values;
  if (values.empty()) values = {"0.05", "0.1", "0.15", "0.2"};
  ConfigMap base = c.raw;
  base.erase("sweep_values");
  base.erase("sweep_key");
  const SweepResult sweep = run_sweep(base, c.sweep_key, values, out_dir, worker_threads());
  ScenarioResult r;
  r.verdicts = sweep.verdicts;
  for (const auto& p : sweep.points) {
    r.summary.emplace_back(c.sweep_key + "=" + p.value + " m0", num(p.m0));
    r.summary.emplace_back(c.sweep_key + "=" + p.value + " scaled_coupling", num(p.scaled));
  }
  return r;
}

}  // namespace

ScenarioResult run_scenario(const SimConfig& c, const std::filesystem::path& out_dir) {
  ScenarioResult r;
  std::vector<FluidState> checkpoints;
  if (c.scenario == "decay" || c.scenario == "vacuum-smoke") {
    Simulation sim = simulate(c);
    r.verdicts = c.scenario == "decay" ? decay_verdicts(sim, c) : stability_verdicts(sim, c);
    r.summary = simulation_summary(sim, c);
    r.rows = std::move(sim.rows);
    checkpoints = std::move(sim.checkpoints);
  } else if (c.scenario == "oracles") {
    r = oracle_scenario(c);
  } else if (c.scenario == "stokes-probe") {
    r = stokes_probe_scenario(c);
  } else if (c.scenario == "threshold-sweep") {
    r = sweep_scenario(c, out_dir);
  } else {
    throw ConfigError("scenario: unknown scenario '" + c.scenario + "'");
  }
  write_run(out_dir, c, r, checkpoints);
  return r;
}

int worker_threads() {
  int n = int(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BENARD_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = n > 0 ? std::min(n, cap) : cap;
  }
  return std::max(1, n);
}

SweepResult run_sweep(const ConfigMap& base, const std::string& key, const std::vector<std::string>& values,
                      const std::filesystem::path& out_dir, int threads) {
  if (values.empty()) throw ConfigError("sweep: no values given");
  std::vector<SimConfig> configs;
  std::vector<std::filesystem::path> dirs;
  for (const auto& value : values) {
    ConfigMap m = base;
    m["scenario"] = "decay";
    m[key] = value;
    const auto dir = out_dir / (key + "_" + value);
    m["out"] = dir.string();
    configs.push_back(build_config(m));
    dirs.push_back(dir);
  }

  SweepResult out;
  out.points.resize(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < values.size();) {
      try {
        const ScenarioResult r = run_scenario(configs[i], dirs[i]);
        SweepPoint& p = out.points[i];
        p.value = values[i];
        p.m0 = r.rows.front().mass_l1;
        for (const auto& row : r.rows) {
          p.sup_c1_ratio = std::max(p.sup_c1_ratio, row.c1_ratio);
          const double den = row.grad_u_l2 * row.grad_theta_l2;
          if (den > 0.0) p.sup_coupling = std::max(p.sup_coupling, std::abs(row.B) / den);
        }
        p.scaled = p.sup_coupling / std::pow(p.m0, 2.0 / 3.0);
        p.monotone_energy = std::any_of(r.verdicts.begin(), r.verdicts.end(),
                                        [](const Verdict& v) { return v.name == "monotone_energy" && v.holds; });
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::max(1, std::min<int>(threads, int(values.size())));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  double lo = INFINITY, hi = 0.0;
  bool finite = true;
  for (const auto& p : out.points) {
    lo = std::min(lo, p.scaled);
    hi = std::max(hi, p.scaled);
    finite = finite && std::isfinite(p.sup_c1_ratio);
  }
  out.verdicts.push_back(margin_verdict("sup_c1_ratio_bounded", finite ? 1.0 : -1.0));
  out.verdicts.push_back(margin_verdict("sweep_scaling_factor2", lo > 0.0 ? 2.0 - hi / lo : -1.0));

  std::string csv = "value,m0,sup_c1_ratio,sup_coupling,scaled_coupling,monotone_energy\n";
  for (const auto& p : out.points)
    csv += p.value + ',' + num(p.m0) + ',' + num(p.sup_c1_ratio) + ',' + num(p.sup_coupling) + ',' + num(p.scaled) +
           ',' + (p.monotone_energy ? "true" : "false") + '\n';
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  write_atomic(out_dir / "sweep.csv", csv);
  return out;
}

}  // namespace benard
