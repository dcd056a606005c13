#ifndef DYNINT_ENV_HPP_
#define DYNINT_ENV_HPP_

// Multi-agent Markov reward environment.
//
// Each individual carries a finite-state chain. The transition kernel at
// (i, t) depends on i's own arm and the treated fraction of N_t(i) through a
// scalar summary phi = w * own_arm + (1 - w) * fraction, which blends two
// endpoint kernels (phi = 0 and phi = 1). Rapid mixing is enforced by
// construction:
//
//   P = (1 - lambda) * 1 anchor(phi, t) + lambda * base(phi),
//   lambda = exp(-1 / t_mix),
//
// so TV(fP, f'P) = lambda * TV(f base, f' base) <= lambda * TV(f, f').

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dynint/design.hpp"
#include "dynint/graphs.hpp"
#include "dynint/rng.hpp"

namespace dynint {

inline constexpr int kMaxStates = 16;

using Distribution =
    Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor, 1, kMaxStates>;
using Kernel = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor, kMaxStates, kMaxStates>;
using StateValues =
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxStates, 1>;

struct ArmContext {
  int individual = 0;
  int round = 0;
  int own_arm = 0;
  double treated_fraction = 0.0;
};

// mu(s) = (1 - psi) * values[0][s] + psi * values[1][s], with
// psi = own_weight * own_arm + (1 - own_weight) * fraction.
struct OutcomeTable {
  std::array<StateValues, 2> values;
  double own_weight = 1.0;
};

struct EnvironmentSpec {
  double t_mix = 1.0;
  double sigma = 0.0;
  std::array<Kernel, 2> base_kernels;     // at summary 0 and 1
  std::array<Distribution, 2> anchors;    // at summary 0 and 1
  double kernel_own_weight = 0.5;
  OutcomeTable outcome;
  Distribution initial;
  // m_t = amplitude * (1 + sin(2 pi (t + 1) / period)) / 2 mixes the anchor
  // toward uniform and the outcome toward 1/2.
  double modulation_amplitude = 0.0;
  double modulation_period = 1.0;
};

class Environment {
 public:
  Environment() = default;
  // Validates the spec; throws std::invalid_argument naming the offending
  // component. Rows within 1e-9 of stochastic are renormalised exactly.
  explicit Environment(EnvironmentSpec spec);

  int n_states() const { return static_cast<int>(spec_.initial.size()); }
  double t_mix() const { return spec_.t_mix; }
  double sigma() const { return spec_.sigma; }
  // lambda = exp(-1 / t_mix): the one-step TV contraction factor.
  double contraction() const { return lambda_; }
  const Distribution& initial() const { return spec_.initial; }
  const EnvironmentSpec& spec() const { return spec_; }

  double modulation(int t) const;
  Kernel kernel(const ArmContext& ctx) const;
  // Writes row `state` of kernel(ctx) into out (size n_states()).
  void transition_row(const ArmContext& ctx, int state,
                      std::span<double> out) const;
  double outcome(const ArmContext& ctx, int state) const;
  StateValues outcome_values(const ArmContext& ctx) const;

  Environment with_initial(const Distribution& f) const;

 private:
  double kernel_summary(const ArmContext& ctx) const;
  Distribution anchor(double phi, int t) const;

  EnvironmentSpec spec_;
  double lambda_ = 0.0;
};

Environment build_env(EnvironmentSpec spec);

// Random spec: Dirichlet(1) rows and anchors, uniform outcome tables,
// random own-weights and a mild periodic modulation.
EnvironmentSpec random_environment_spec(int n_states, double t_mix,
                                        double sigma, Engine& rng);

// Fraction of treated entries, i included.
double treated_fraction(std::span<const std::uint8_t> local_arms);

ArmContext arm_context(const GraphSequence& g, const AssignmentMatrix& w,
                       int i, int t);

double total_variation(const Distribution& a, const Distribution& b);

class OutcomePanel {
 public:
  OutcomePanel() = default;
  OutcomePanel(int n_individuals, int horizon, std::vector<double> values,
               std::vector<int> states = {});

  int n_individuals() const { return n_; }
  int horizon() const { return horizon_; }
  double y(int i, int t) const {
    return values_[static_cast<std::size_t>(i) * horizon_ + t];
  }
  bool has_states() const { return !states_.empty(); }
  int state(int i, int t) const {
    return states_.at(static_cast<std::size_t>(i) * horizon_ + t);
  }
  std::span<const double> values() const { return values_; }

 private:
  int n_ = 0;
  int horizon_ = 0;
  std::vector<double> values_;  // i * horizon + t
  std::vector<int> states_;
};

// S_{i,0} ~ initial, S_{i,t+1} ~ kernel row, Y = mu + N(0, sigma^2) per (i,t).
OutcomePanel simulate(const Environment& env, const GraphSequence& g,
                      const AssignmentMatrix& w, std::uint64_t seed);
OutcomePanel simulate(const Environment& env, const GraphSequence& g,
                      const AssignmentMatrix& w, Engine& rng);

struct ExactPropagation {
  int n_individuals = 0;
  int horizon = 0;
  std::vector<Distribution> states;  // law of S_it, i * horizon + t
  std::vector<double> mean;          // E[Y_it | W = w]

  const Distribution& state(int i, int t) const {
    return states[static_cast<std::size_t>(i) * horizon + t];
  }
  double mean_at(int i, int t) const {
    return mean[static_cast<std::size_t>(i) * horizon + t];
  }
};

// Forward Chapman-Kolmogorov propagation. Given W the chains are independent,
// so per-individual marginals are exact.
ExactPropagation propagate_exact(const Environment& env, const GraphSequence& g,
                                 const AssignmentMatrix& w);

// Mean over (i,t) of E[Y | W = 1] - E[Y | W = 0].
double true_ate(const Environment& env, const GraphSequence& g);

struct InitialSensitivity {
  double difference = 0.0;    // |ATE(f) - ATE(f')|
  double stated_bound = 0.0;  // (1/NT) sum_{t=1}^T exp(-t/t_mix)
  // (2 TV(f,f') / T) sum_{t=0}^{T-1} lambda^t, which the chains provably obey.
  double valid_bound = 0.0;
};

InitialSensitivity initial_sensitivity(const Environment& env,
                                       const GraphSequence& g,
                                       const Distribution& f,
                                       const Distribution& f_alt);

}  // namespace dynint

#endif  // DYNINT_ENV_HPP_
