#ifndef DYNINT_ORACLE_HPP_
#define DYNINT_ORACLE_HPP_

// Ground truth for the HT estimator: exact moments by enumerating cluster arms
// on small instances, Monte Carlo moments otherwise, and the bound ledger.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynint/analysis.hpp"
#include "dynint/design.hpp"
#include "dynint/env.hpp"
#include "dynint/graphs.hpp"

namespace dynint {

enum class OracleMode { kExact, kMonteCarlo };

const char* to_string(OracleMode mode);

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(int clusters, int budget);
  int clusters() const { return clusters_; }
  int budget() const { return budget_; }

 private:
  int clusters_;
  int budget_;
};

struct ExactOptions {
  // Maximum number of clusters enumerated jointly (2^budget assignments).
  int budget = 20;
  bool pair_cov = false;
};

struct McOptions {
  long replications = 1000;
  std::uint64_t seed = 0;
  // Replace simulated outcomes by E[Y | W]; the reported variance is then
  // Var(E[estimate | W]) only.
  bool rao_blackwell = false;
  int jobs = 1;
};

struct MomentReport {
  OracleMode mode = OracleMode::kExact;
  int radius = 0;
  int n_individuals = 0;
  int horizon = 0;
  double mean_estimate = 0.0;
  double variance = 0.0;
  double true_ate = 0.0;
  double bias = 0.0;

  // Exact mode. Groups are sets of individuals whose estimator terms depend
  // on disjoint sets of clusters; their contributions are independent.
  double variance_lotc = 0.0;
  double expected_conditional_variance = 0.0;
  double variance_of_conditional_mean = 0.0;
  std::vector<double> cell_means;  // E[Delta_it], i * T + t
  std::vector<double> pair_cov;    // a * NT + b with a = i * T + t
  int n_groups = 0;
  int max_group_clusters = 0;
  long long assignments = 0;

  // Monte Carlo mode.
  long replications = 0;
  double se_mean = 0.0;
  double se_variance = 0.0;
  bool rao_blackwell = false;

  double mse() const { return bias * bias + variance; }
  bool has_pair_cov() const { return !pair_cov.empty(); }
  double cov(int i, int t, int j, int u) const {
    const std::size_t cells = static_cast<std::size_t>(n_individuals) * horizon;
    return pair_cov[(static_cast<std::size_t>(i) * horizon + t) * cells +
                    static_cast<std::size_t>(j) * horizon + u];
  }
};

// Groups of individuals whose full-history neighbourhoods share a cluster
// (transitively), each with the clusters it touches, ascending.
struct OracleGroup {
  std::vector<int> individuals;
  std::vector<int> clusters;
};
std::vector<OracleGroup> oracle_groups(const GraphSequence& g,
                                       const VerticalDesign& d);

// Throws BudgetExceeded when a group touches more than options.budget clusters.
MomentReport exact_moments(const Environment& env, const GraphSequence& g,
                           const VerticalDesign& d, int radius,
                           const ExactOptions& options = {});

MomentReport mc_moments(const Environment& env, const GraphSequence& g,
                        const VerticalDesign& d, int radius,
                        const McOptions& options);

enum class Verdict { kPass, kFail, kUnresolved };

const char* to_string(Verdict v);

struct LedgerRow {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - measured
  Verdict verdict = Verdict::kUnresolved;
  long long checked = 0;
  long long violations = 0;
  std::string detail;
};

struct VerifyOptions {
  OracleMode mode = OracleMode::kExact;
  ExactOptions exact;
  McOptions mc;
  BoundConstants constants;
  // Pair covariances are skipped (rows UNRESOLVED) above this many cells.
  int max_pair_cells = 2048;
};

struct Ledger {
  BoundReport bounds;
  MomentReport moments;
  OracleMode mode = OracleMode::kExact;
  std::vector<LedgerRow> rows;

  bool all_pass() const;
  const LedgerRow* find(const std::string& name) const;
};

// Rows: bias, variance, mse, covariance_lit, never_interacting_zero,
// exposure_lower_bound.
Ledger verify_bounds(const Environment& env, const GraphSequence& g,
                     const VerticalDesign& d, int radius,
                     const VerifyOptions& options = {});

}  // namespace dynint

#endif  // DYNINT_ORACLE_HPP_
