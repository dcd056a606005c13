#include "dynint/env.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace dynint {
namespace {

constexpr double kStochasticTolerance = 1e-9;

void check_unit(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(what + " must lie in [0,1]");
  }
}

template <typename Row>
void normalise_probability(Row&& row, const std::string& what) {
  double sum = 0.0;
  for (Eigen::Index s = 0; s < row.size(); ++s) {
    if (!(row(s) >= 0.0)) throw std::invalid_argument(what + " has a negative entry");
    sum += row(s);
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    throw std::invalid_argument(what + " does not sum to 1");
  }
  row /= sum;
}

Distribution dirichlet_one(int n, Engine& rng) {
  std::exponential_distribution<double> expo(1.0);
  Distribution d(n);
  for (int s = 0; s < n; ++s) d(s) = expo(rng);
  return d / d.sum();
}

}  // namespace

Environment::Environment(EnvironmentSpec spec) : spec_(std::move(spec)) {
  const int n = static_cast<int>(spec_.initial.size());
  if (n < 1 || n > kMaxStates) {
    throw std::invalid_argument("n_states must lie in [1, " +
                                std::to_string(kMaxStates) + "]");
  }
  if (!(spec_.t_mix > 0.0)) throw std::invalid_argument("t_mix must be > 0");
  if (!(spec_.sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  check_unit(spec_.kernel_own_weight, "kernel own_weight");
  check_unit(spec_.outcome.own_weight, "outcome own_weight");
  check_unit(spec_.modulation_amplitude, "modulation amplitude");
  if (!(spec_.modulation_period > 0.0)) {
    throw std::invalid_argument("modulation period must be > 0");
  }
  normalise_probability(spec_.initial, "initial distribution");
  for (int a = 0; a < 2; ++a) {
    const std::string tag = a == 0 ? "control" : "treated";
    Kernel& base = spec_.base_kernels[a];
    if (base.rows() != n || base.cols() != n) {
      throw std::invalid_argument("base kernel (" + tag + ") must be " +
                                  std::to_string(n) + "x" + std::to_string(n));
    }
    for (int s = 0; s < n; ++s) {
      normalise_probability(base.row(s), "base kernel (" + tag + ") row " +
                                             std::to_string(s + 1));
    }
    if (spec_.anchors[a].size() != n) {
      throw std::invalid_argument("anchor (" + tag + ") has wrong size");
    }
    normalise_probability(spec_.anchors[a], "anchor (" + tag + ")");
    if (spec_.outcome.values[a].size() != n) {
      throw std::invalid_argument("outcome table (" + tag + ") has wrong size");
    }
    for (int s = 0; s < n; ++s) {
      check_unit(spec_.outcome.values[a](s), "outcome value (" + tag + ")");
    }
  }
  lambda_ = std::exp(-1.0 / spec_.t_mix);
}

double Environment::modulation(int t) const {
  if (spec_.modulation_amplitude == 0.0) return 0.0;
  const double phase =
      2.0 * std::numbers::pi * static_cast<double>(t + 1) / spec_.modulation_period;
  return spec_.modulation_amplitude * 0.5 * (1.0 + std::sin(phase));
}

double Environment::kernel_summary(const ArmContext& ctx) const {
  const double w = spec_.kernel_own_weight;
  return w * ctx.own_arm + (1.0 - w) * ctx.treated_fraction;
}

Distribution Environment::anchor(double phi, int t) const {
  const int n = n_states();
  Distribution a = (1.0 - phi) * spec_.anchors[0] + phi * spec_.anchors[1];
  const double m = modulation(t);
  if (m > 0.0) a = (1.0 - m) * a + Distribution::Constant(n, m / n);
  return a;
}

Kernel Environment::kernel(const ArmContext& ctx) const {
  const int n = n_states();
  const double phi = kernel_summary(ctx);
  const Distribution a = anchor(phi, ctx.round);
  Kernel k = lambda_ * ((1.0 - phi) * spec_.base_kernels[0] +
                        phi * spec_.base_kernels[1]);
  for (int s = 0; s < n; ++s) k.row(s) += (1.0 - lambda_) * a;
  return k;
}

void Environment::transition_row(const ArmContext& ctx, int state,
                                 std::span<double> out) const {
  const int n = n_states();
  const double phi = kernel_summary(ctx);
  const Distribution a = anchor(phi, ctx.round);
  const auto& b0 = spec_.base_kernels[0];
  const auto& b1 = spec_.base_kernels[1];
  for (int s = 0; s < n; ++s) {
    out[s] = lambda_ * ((1.0 - phi) * b0(state, s) + phi * b1(state, s)) +
             (1.0 - lambda_) * a(s);
  }
}

double Environment::outcome(const ArmContext& ctx, int state) const {
  const double w = spec_.outcome.own_weight;
  const double psi = w * ctx.own_arm + (1.0 - w) * ctx.treated_fraction;
  const double mu = (1.0 - psi) * spec_.outcome.values[0](state) +
                    psi * spec_.outcome.values[1](state);
  const double m = modulation(ctx.round);
  return m > 0.0 ? (1.0 - m) * mu + 0.5 * m : mu;
}

StateValues Environment::outcome_values(const ArmContext& ctx) const {
  StateValues v(n_states());
  for (int s = 0; s < n_states(); ++s) v(s) = outcome(ctx, s);
  return v;
}

Environment Environment::with_initial(const Distribution& f) const {
  EnvironmentSpec spec = spec_;
  spec.initial = f;
  return Environment(std::move(spec));
}

Environment build_env(EnvironmentSpec spec) { return Environment(std::move(spec)); }

EnvironmentSpec random_environment_spec(int n_states, double t_mix,
                                        double sigma, Engine& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  EnvironmentSpec spec;
  spec.t_mix = t_mix;
  spec.sigma = sigma;
  for (int a = 0; a < 2; ++a) {
    spec.base_kernels[a].resize(n_states, n_states);
    for (int s = 0; s < n_states; ++s) {
      spec.base_kernels[a].row(s) = dirichlet_one(n_states, rng);
    }
    spec.anchors[a] = dirichlet_one(n_states, rng);
    spec.outcome.values[a].resize(n_states);
    for (int s = 0; s < n_states; ++s) spec.outcome.values[a](s) = unif(rng);
  }
  spec.kernel_own_weight = unif(rng);
  spec.outcome.own_weight = unif(rng);
  spec.initial = dirichlet_one(n_states, rng);
  spec.modulation_amplitude = 0.5 * unif(rng);
  spec.modulation_period = 2.0 + std::floor(5.0 * unif(rng));
  return spec;
}

double treated_fraction(std::span<const std::uint8_t> local_arms) {
  if (local_arms.empty()) {
    throw std::invalid_argument("local assignment must include the individual");
  }
  int treated = 0;
  for (auto a : local_arms) treated += a != 0;
  return static_cast<double>(treated) / static_cast<double>(local_arms.size());
}

ArmContext arm_context(const GraphSequence& g, const AssignmentMatrix& w,
                       int i, int t) {
  const auto nb = g.neighbors(i, t);
  int treated = w.at(i, t);
  for (int j : nb) treated += w.at(j, t);
  return {i, t, w.at(i, t),
          static_cast<double>(treated) / static_cast<double>(nb.size() + 1)};
}

double total_variation(const Distribution& a, const Distribution& b) {
  return 0.5 * (a - b).cwiseAbs().sum();
}

OutcomePanel::OutcomePanel(int n_individuals, int horizon,
                           std::vector<double> values, std::vector<int> states)
    : n_(n_individuals),
      horizon_(horizon),
      values_(std::move(values)),
      states_(std::move(states)) {
  const auto cells = static_cast<std::size_t>(n_) * horizon_;
  if (values_.size() != cells || (!states_.empty() && states_.size() != cells)) {
    throw std::invalid_argument("outcome panel size must be N * T");
  }
}

namespace {

void check_shapes(const Environment& env, const GraphSequence& g,
                  const AssignmentMatrix& w) {
  if (env.n_states() < 1) throw std::invalid_argument("environment not built");
  if (g.n_individuals() != w.n_individuals() || g.horizon() != w.horizon()) {
    throw std::invalid_argument("graph and assignment dimensions disagree");
  }
}

int draw_state(std::span<const double> probs, double u) {
  double acc = 0.0;
  const int n = static_cast<int>(probs.size());
  for (int s = 0; s < n - 1; ++s) {
    acc += probs[s];
    if (u < acc) return s;
  }
  return n - 1;
}

}  // namespace

OutcomePanel simulate(const Environment& env, const GraphSequence& g,
                      const AssignmentMatrix& w, std::uint64_t seed) {
  Engine rng = make_engine(seed, kStreamOutcome);
  return simulate(env, g, w, rng);
}

OutcomePanel simulate(const Environment& env, const GraphSequence& g,
                      const AssignmentMatrix& w, Engine& rng) {
  check_shapes(env, g, w);
  const int n = g.n_individuals();
  const int horizon = g.horizon();
  const int n_states = env.n_states();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<double> values(static_cast<std::size_t>(n) * horizon);
  std::vector<int> states(values.size());
  std::vector<int> current(n);
  std::array<double, kMaxStates> init{};
  for (int s = 0; s < n_states; ++s) init[s] = env.initial()(s);
  for (int i = 0; i < n; ++i) {
    current[i] = draw_state(std::span(init.data(), n_states), unif(rng));
  }
  std::array<double, kMaxStates> row{};
  for (int t = 0; t < horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      const ArmContext ctx = arm_context(g, w, i, t);
      const std::size_t cell = static_cast<std::size_t>(i) * horizon + t;
      states[cell] = current[i];
      double y = env.outcome(ctx, current[i]);
      if (env.sigma() > 0.0) y += env.sigma() * noise(rng);
      values[cell] = y;
      if (t + 1 < horizon) {
        env.transition_row(ctx, current[i], std::span(row.data(), n_states));
        current[i] = draw_state(std::span(row.data(), n_states), unif(rng));
      }
    }
  }
  return OutcomePanel(n, horizon, std::move(values), std::move(states));
}

ExactPropagation propagate_exact(const Environment& env, const GraphSequence& g,
                                 const AssignmentMatrix& w) {
  check_shapes(env, g, w);
  ExactPropagation out;
  out.n_individuals = g.n_individuals();
  out.horizon = g.horizon();
  const auto cells = static_cast<std::size_t>(out.n_individuals) * out.horizon;
  out.states.resize(cells);
  out.mean.resize(cells);
  for (int i = 0; i < out.n_individuals; ++i) {
    Distribution f = env.initial();
    for (int t = 0; t < out.horizon; ++t) {
      const ArmContext ctx = arm_context(g, w, i, t);
      const std::size_t cell = static_cast<std::size_t>(i) * out.horizon + t;
      out.states[cell] = f;
      out.mean[cell] = f.dot(env.outcome_values(ctx).transpose());
      if (t + 1 < out.horizon) f = f * env.kernel(ctx);
    }
  }
  return out;
}

double true_ate(const Environment& env, const GraphSequence& g) {
  const int n = g.n_individuals();
  const int horizon = g.horizon();
  const auto treated =
      propagate_exact(env, g, AssignmentMatrix::constant(n, horizon, 1));
  const auto control =
      propagate_exact(env, g, AssignmentMatrix::constant(n, horizon, 0));
  double sum = 0.0;
  for (std::size_t c = 0; c < treated.mean.size(); ++c) {
    sum += treated.mean[c] - control.mean[c];
  }
  return sum / static_cast<double>(treated.mean.size());
}

InitialSensitivity initial_sensitivity(const Environment& env,
                                       const GraphSequence& g,
                                       const Distribution& f,
                                       const Distribution& f_alt) {
  const Environment a = env.with_initial(f);
  const Environment b = env.with_initial(f_alt);
  InitialSensitivity out;
  out.difference = std::abs(true_ate(a, g) - true_ate(b, g));
  const int n = g.n_individuals();
  const int horizon = g.horizon();
  double stated = 0.0;
  double geometric = 0.0;
  double power = 1.0;
  for (int t = 1; t <= horizon; ++t) {
    stated += std::exp(-static_cast<double>(t) / env.t_mix());
    geometric += power;
    power *= env.contraction();
  }
  out.stated_bound = stated / (static_cast<double>(n) * horizon);
  out.valid_bound = 2.0 * total_variation(a.initial(), b.initial()) * geometric /
                    static_cast<double>(horizon);
  return out;
}

}  // namespace dynint
