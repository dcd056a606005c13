#ifndef DYNINT_CONFIG_HPP_
#define DYNINT_CONFIG_HPP_

// Experiment configuration: INI-style sections of flat key = value pairs.
// Any key may be overridden from the environment as DYNINT_<SECTION>_<KEY>.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynint/graphs.hpp"
#include "dynint/oracle.hpp"

namespace dynint {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct GraphConfig {
  std::string kind = "dynamic_er";  // static|edgeless|complete|dynamic_er|metric
  int n = 4;
  int horizon = 8;
  std::vector<Edge> edges;  // static
  ErParams er{0.5, 0.3, 0.3};
  double v_max = 0.05;  // metric
  double kappa = 0.2;
};

struct EnvConfig {
  std::string family = "random";  // random|own_arm|tracking|null
  int n_states = 2;
  double t_mix = 1.0;
  double sigma = 0.0;
  double kernel_own_weight = 0.5;
};

struct DesignConfig {
  std::optional<int> block_len;  // nullopt: AUTO
  std::string partition = "singleton";  // singleton|single|grid|components
  double cell_side = 0.5;
};

struct OracleConfig {
  OracleMode mode = OracleMode::kExact;
  long replications = 1000;
  int budget = 20;
  bool rao_blackwell = false;
  int jobs = 1;
};

struct OutputConfig {
  std::string dir = "out";
  bool pair_table = false;
};

struct SweepConfig {
  std::string axis;
  std::vector<double> values;
  std::vector<int> grid_n;
  std::vector<int> grid_t;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  GraphConfig graph;
  EnvConfig env;
  DesignConfig design;
  std::optional<int> radius;  // nullopt: AUTO
  OracleConfig oracle;
  OutputConfig output;
  SweepConfig sweep;
  // Resolved section.key -> value text, after overrides.
  std::map<std::string, std::string> raw;

  int resolved_block_len() const;
  int resolved_radius() const;
  // FNV-1a over the canonical key listing, as 16 hex digits. output.dir and
  // oracle.jobs are left out.
  std::string hash() const;
};

using Overrides = std::map<std::string, std::string>;

// DYNINT_<SECTION>_<KEY> variables from the process environment, keyed as
// "section.key".
Overrides environment_overrides();

ExperimentConfig parse_config(std::istream& is, const Overrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             const Overrides& overrides = {});

// Re-resolves after changing one "section.key" value.
ExperimentConfig with_value(const ExperimentConfig& cfg, const std::string& key,
                            const std::string& value);

}  // namespace dynint

#endif  // DYNINT_CONFIG_HPP_
