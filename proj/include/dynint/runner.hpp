#ifndef DYNINT_RUNNER_HPP_
#define DYNINT_RUNNER_HPP_

// Scenario assembly and the run / verify / sweep / gen-graphs commands.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dynint/config.hpp"
#include "dynint/design.hpp"
#include "dynint/env.hpp"
#include "dynint/graphs.hpp"
#include "dynint/oracle.hpp"

namespace dynint {

struct Scenario {
  GraphSequence graphs;
  std::optional<TrajectorySet> trajectories;
  Environment env;
  VerticalDesign design;
  int radius = 0;
};

Environment make_environment(const EnvConfig& cfg, std::uint64_t seed);
Scenario build_scenario(const ExperimentConfig& cfg);

VerifyOptions verify_options(const ExperimentConfig& cfg);

// Each returns a process exit status and writes into cfg.output.dir.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);
int run_verify(const ExperimentConfig& cfg, std::ostream& log);
int run_gen_graphs(const ExperimentConfig& cfg, std::ostream& log);
// axis: N, T, r, l (also "ell", "block_len") or p_birth.
int run_sweep(const ExperimentConfig& cfg, const std::string& axis,
              const std::vector<double>& values, std::ostream& log);

}  // namespace dynint

#endif  // DYNINT_RUNNER_HPP_
