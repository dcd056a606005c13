// Command-line front end: run, sweep, verify, gen-graphs.

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynint/config.hpp"
#include "dynint/oracle.hpp"
#include "dynint/runner.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<long long> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "experiment config file")
      ->required();
  cmd->add_option("--seed", flags.seed, "override scenario.seed");
  cmd->add_option("--out", flags.out, "override output.dir");
  cmd->add_option("--jobs", flags.jobs, "worker threads for Monte Carlo");
}

dynint::ExperimentConfig load(const CommonFlags& flags) {
  auto overrides = dynint::environment_overrides();
  if (flags.seed) overrides["scenario.seed"] = std::to_string(*flags.seed);
  if (flags.out) overrides["output.dir"] = *flags.out;
  if (flags.jobs) overrides["oracle.jobs"] = std::to_string(*flags.jobs);
  return dynint::load_config(flags.config, overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynint: experiments under dynamic spatio-temporal interference"};
  app.require_subcommand(1);

  CommonFlags run_flags, verify_flags, gen_flags, sweep_flags;
  auto* run = app.add_subcommand("run", "full pipeline and bound ledger");
  add_common(run, run_flags);
  auto* verify = app.add_subcommand("verify", "bound ledger only");
  add_common(verify, verify_flags);
  auto* gen = app.add_subcommand("gen-graphs", "write graphs.txt only");
  add_common(gen, gen_flags);
  auto* sweep = app.add_subcommand("sweep", "one ledger row per axis value");
  add_common(sweep, sweep_flags);
  std::string axis;
  std::string values;
  sweep->add_option("--axis", axis, "N, T, r, l or p_birth");
  sweep->add_option("--values", values, "comma-separated axis values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return dynint::run_experiment(load(run_flags), std::cout);
    if (verify->parsed()) return dynint::run_verify(load(verify_flags), std::cout);
    if (gen->parsed()) return dynint::run_gen_graphs(load(gen_flags), std::cout);
    const auto cfg = load(sweep_flags);
    const std::string a = axis.empty() ? cfg.sweep.axis : axis;
    if (a.empty()) throw dynint::ConfigError("--axis", "no sweep axis given");
    std::vector<double> vals = cfg.sweep.values;
    if (sweep->count("--values") > 0) {
      vals.clear();
      std::string tok;
      for (char c : values + ",") {
        if (c == ',' || c == ' ') {
          if (!tok.empty()) {
            try {
              vals.push_back(std::stod(tok));
            } catch (const std::exception&) {
              throw dynint::ConfigError("--values", "not a number: " + tok);
            }
          }
          tok.clear();
        } else {
          tok += c;
        }
      }
    }
    return dynint::run_sweep(cfg, a, vals, std::cout);
  } catch (const dynint::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const dynint::BudgetExceeded& e) {
    std::cerr << "exact oracle refused: " << e.what()
              << " (raise oracle.budget or use oracle.mode = MC)\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
