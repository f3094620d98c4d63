// benard: run, sweep and probe-stokes subcommands.
//
// Exit status: 0 when every verdict of the scenario holds, 1 when some verdict
// fails, 2 on configuration, solver or I/O errors.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "benard/config.hpp"
#include "benard/error.hpp"
#include "benard/scenarios.hpp"

namespace {

int report(const benard::ScenarioResult& r, const std::filesystem::path& out) {
  for (const auto& v : r.verdicts) std::cout << benard::format_verdict(v) << '\n';
  std::cout << "outputs in " << out.string() << '\n';
  return r.all_hold() ? 0 : 1;
}

std::filesystem::path out_dir(const std::string& flag, const benard::SimConfig& c) {
  return flag.empty() ? c.out_dir : std::filesystem::path(flag);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonhomogeneous Benard solver with an a-priori-estimate ledger"};
  app.require_subcommand(1);

  std::string config_path, out_flag, key = "m0_radius", values;

  auto* run = app.add_subcommand("run", "run the scenario named in the config");
  run->add_option("--config", config_path, "flat key = value config file")->required();
  run->add_option("--out", out_flag, "output directory (default: config 'out' or ./out)");

  auto* sweep = app.add_subcommand("sweep", "repeat the decay scenario over values of one key");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--key", key, "config key to vary")->capture_default_str();
  sweep->add_option("--values", values, "comma-separated values")->required();
  sweep->add_option("--out", out_flag);

  auto* probe = app.add_subcommand("probe-stokes", "steady Stokes regularity probe");
  probe->add_option("--config", config_path)->required();
  probe->add_option("--out", out_flag);

  CLI11_PARSE(app, argc, argv);

  try {
    benard::SimConfig config = benard::load_config(config_path);
    if (run->parsed()) {
      const auto out = out_dir(out_flag, config);
      return report(benard::run_scenario(config, out), out);
    }
    if (sweep->parsed()) {
      const auto out = out_dir(out_flag, config);
      benard::ConfigMap base = config.raw;
      base.erase("sweep_values");
      base.erase("sweep_key");
      const auto result =
          benard::run_sweep(base, key, benard::split_list(values), out, benard::worker_threads());
      benard::write_verdicts(result.verdicts, out / "verdicts.txt");
      std::ifstream csv(out / "sweep.csv");
      std::cout << csv.rdbuf();
      benard::ScenarioResult r;
      r.verdicts = result.verdicts;
      return report(r, out);
    }
    config.scenario = "stokes-probe";
    const auto out = out_dir(out_flag, config);
    return report(benard::run_scenario(config, out), out);
  } catch (const benard::HypothesisError& e) {
    std::cerr << "hypothesis violation: " << e.what() << '\n';
  } catch (const benard::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 2;
}
