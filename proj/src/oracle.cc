#include "dynint/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "dynint/estimator.hpp"

namespace dynint {

const char* to_string(OracleMode mode) {
  return mode == OracleMode::kExact ? "EXACT" : "MONTE_CARLO";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "PASS";
    case Verdict::kFail:
      return "FAIL";
    case Verdict::kUnresolved:
      break;
  }
  return "UNRESOLVED";
}

BudgetExceeded::BudgetExceeded(int clusters, int budget)
    : std::runtime_error("exact enumeration needs " + std::to_string(clusters) +
                         " clusters jointly, budget is " +
                         std::to_string(budget)),
      clusters_(clusters),
      budget_(budget) {}

std::vector<OracleGroup> oracle_groups(const GraphSequence& g,
                                       const VerticalDesign& d) {
  const int n = g.n_individuals();
  const int horizon = g.horizon();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::vector<int>> touched(n);
  std::vector<int> owner(d.n_clusters(), -1);
  for (int i = 0; i < n; ++i) {
    touched[i] = clusters_touching(
        d, spatio_temporal_neighborhood(g, i, horizon - 1, horizon - 1));
    for (int c : touched[i]) {
      if (owner[c] == -1) {
        owner[c] = i;
      } else {
        const int a = find(owner[c]);
        const int b = find(i);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<OracleGroup> groups;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (slot[root] == -1) {
      slot[root] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    auto& grp = groups[slot[root]];
    grp.individuals.push_back(i);
    grp.clusters.insert(grp.clusters.end(), touched[i].begin(),
                        touched[i].end());
  }
  for (auto& grp : groups) {
    std::sort(grp.clusters.begin(), grp.clusters.end());
    grp.clusters.erase(std::unique(grp.clusters.begin(), grp.clusters.end()),
                       grp.clusters.end());
  }
  return groups;
}

namespace {

// Conditional law of one individual's chain given a fixed assignment.
struct ChainPass {
  std::vector<Distribution> f;
  std::vector<StateValues> mu;
  std::vector<Kernel> kernel;
  std::vector<double> mean;
};

void run_chain(const Environment& env, const GraphSequence& g,
               const AssignmentMatrix& w, int i, ChainPass& pass) {
  const int horizon = g.horizon();
  pass.f.resize(horizon);
  pass.mu.resize(horizon);
  pass.kernel.resize(horizon);
  pass.mean.resize(horizon);
  Distribution f = env.initial();
  for (int t = 0; t < horizon; ++t) {
    const ArmContext ctx = arm_context(g, w, i, t);
    pass.f[t] = f;
    pass.mu[t] = env.outcome_values(ctx);
    pass.mean[t] = f.dot(pass.mu[t].transpose());
    if (t + 1 < horizon) {
      pass.kernel[t] = env.kernel(ctx);
      f = f * pass.kernel[t];
    }
  }
}

struct ExposedCell {
  int individual;
  int round;
  int local;  // index into the group's cell list
  double coef;
  double mean;
};

}  // namespace

MomentReport exact_moments(const Environment& env, const GraphSequence& g,
                           const VerticalDesign& d, int radius,
                           const ExactOptions& options) {
  const int n = g.n_individuals();
  const int horizon = g.horizon();
  const std::size_t cells = static_cast<std::size_t>(n) * horizon;
  const double scale = 1.0 / static_cast<double>(cells);
  const double noise_var = env.sigma() * env.sigma();
  const ExposureMap exposures(g, d, radius);
  const auto groups = oracle_groups(g, d);

  MomentReport rep;
  rep.mode = OracleMode::kExact;
  rep.radius = radius;
  rep.n_individuals = n;
  rep.horizon = horizon;
  rep.n_groups = static_cast<int>(groups.size());
  for (const auto& grp : groups) {
    const int k = static_cast<int>(grp.clusters.size());
    rep.max_group_clusters = std::max(rep.max_group_clusters, k);
  }
  if (rep.max_group_clusters > options.budget || rep.max_group_clusters > 62) {
    throw BudgetExceeded(rep.max_group_clusters, options.budget);
  }
  rep.cell_means.assign(cells, 0.0);
  if (options.pair_cov) rep.pair_cov.assign(cells * cells, 0.0);

  std::vector<std::uint8_t> arms(d.n_clusters(), 0);
  ChainPass pass;
  std::vector<ExposedCell> exposed;
  std::vector<double> second;  // within-individual E[Y Y' | w], local x local

  for (const auto& grp : groups) {
    const int k = static_cast<int>(grp.clusters.size());
    const long long count = 1LL << k;
    const int members = static_cast<int>(grp.individuals.size());
    const int local_cells = members * horizon;
    std::vector<double> cell_sum(local_cells, 0.0);
    std::vector<double> pair_sum;
    if (options.pair_cov) {
      pair_sum.assign(static_cast<std::size_t>(local_cells) * local_cells, 0.0);
    }
    double sum_mean = 0.0;
    double sum_mean_sq = 0.0;
    double sum_condvar = 0.0;
    double sum_second = 0.0;
    std::fill(arms.begin(), arms.end(), 0);
    // Only entries written in the current assignment are read back.
    second.assign(static_cast<std::size_t>(local_cells) * local_cells, 0.0);

    for (long long mask = 0; mask < count; ++mask) {
      for (int j = 0; j < k; ++j) arms[grp.clusters[j]] = (mask >> j) & 1;
      const AssignmentMatrix w = assignment_from_arms(d, arms);
      exposed.clear();
      double condmean = 0.0;
      double condvar = 0.0;
      for (int mi = 0; mi < members; ++mi) {
        const int i = grp.individuals[mi];
        run_chain(env, g, w, i, pass);
        const std::size_t first = exposed.size();
        for (int t = 0; t < horizon; ++t) {
          const double c = exposures.coefficient(arms, i, t);
          if (c == 0.0) continue;
          exposed.push_back({i, t, mi * horizon + t, c, pass.mean[t]});
          condmean += c * pass.mean[t];
        }
        // E[mu_t'(S_t') mu_t(S_t) | w] by pushing f_t' * mu_t' forward.
        for (std::size_t a = first; a < exposed.size(); ++a) {
          const int tp = exposed[a].round;
          Distribution h = pass.f[tp].cwiseProduct(pass.mu[tp].transpose());
          int at = tp;
          for (std::size_t b = a; b < exposed.size(); ++b) {
            const int t = exposed[b].round;
            while (at < t) h = h * pass.kernel[at++];
            double m2 = h.dot(pass.mu[t].transpose());
            if (t == tp) m2 += noise_var;
            const double cov = m2 - exposed[a].mean * exposed[b].mean;
            const double term = exposed[a].coef * exposed[b].coef * cov;
            condvar += a == b ? term : 2.0 * term;
            const std::size_t la = exposed[a].local;
            const std::size_t lb = exposed[b].local;
            second[la * local_cells + lb] = m2;
            second[lb * local_cells + la] = m2;
          }
        }
      }
      condmean *= scale;
      condvar *= scale * scale;

      // Second moment from all ordered pairs of exposed cells; different
      // individuals are conditionally independent given w.
      double q = 0.0;
      for (const auto& a : exposed) {
        for (const auto& b : exposed) {
          const double m2 =
              a.individual == b.individual
                  ? second[static_cast<std::size_t>(a.local) * local_cells +
                           b.local]
                  : a.mean * b.mean;
          const double prod = a.coef * b.coef * m2;
          q += prod;
          if (options.pair_cov) {
            pair_sum[static_cast<std::size_t>(a.local) * local_cells +
                     b.local] += prod;
          }
        }
        cell_sum[a.local] += a.coef * a.mean;
      }
      sum_second += q * scale * scale;
      sum_mean += condmean;
      sum_mean_sq += condmean * condmean;
      sum_condvar += condvar;
    }

    const double inv = 1.0 / static_cast<double>(count);
    const double mean = sum_mean * inv;
    rep.mean_estimate += mean;
    rep.variance += sum_second * inv - mean * mean;
    rep.expected_conditional_variance += sum_condvar * inv;
    rep.variance_of_conditional_mean += sum_mean_sq * inv - mean * mean;
    rep.assignments += count;

    auto global = [&](int local) {
      return static_cast<std::size_t>(grp.individuals[local / horizon]) *
                 horizon +
             local % horizon;
    };
    for (int a = 0; a < local_cells; ++a) {
      rep.cell_means[global(a)] = cell_sum[a] * inv;
    }
    if (options.pair_cov) {
      for (int a = 0; a < local_cells; ++a) {
        const std::size_t ga = global(a);
        for (int b = 0; b < local_cells; ++b) {
          const std::size_t gb = global(b);
          rep.pair_cov[ga * cells + gb] =
              pair_sum[static_cast<std::size_t>(a) * local_cells + b] * inv -
              rep.cell_means[ga] * rep.cell_means[gb];
        }
      }
    }
  }
  rep.variance_lotc =
      rep.expected_conditional_variance + rep.variance_of_conditional_mean;
  rep.true_ate = true_ate(env, g);
  rep.bias = std::abs(rep.mean_estimate - rep.true_ate);
  return rep;
}

MomentReport mc_moments(const Environment& env, const GraphSequence& g,
                        const VerticalDesign& d, int radius,
                        const McOptions& options) {
  if (options.replications < 2) {
    throw std::invalid_argument("mc_moments needs at least 2 replications");
  }
  const int n = g.n_individuals();
  const int horizon = g.horizon();
  const double scale = 1.0 / (static_cast<double>(n) * horizon);
  const ExposureMap exposures(g, d, radius);
  const long reps = options.replications;
  std::vector<double> estimates(reps);

  auto work = [&](int worker, int jobs) {
    for (long r = worker; r < reps; r += jobs) {
      Engine rng = make_engine(options.seed,
                               kStreamReplication + static_cast<std::uint64_t>(r));
      auto arms = sample_cluster_arms(d, rng);
      const auto words = pack_arms(arms);
      const AssignmentMatrix w = assignment_from_arms(d, std::move(arms));
      double sum = 0.0;
      if (options.rao_blackwell) {
        const auto prop = propagate_exact(env, g, w);
        for (int i = 0; i < n; ++i) {
          for (int t = 0; t < horizon; ++t) {
            const double c = exposures.coefficient_packed(words, i, t);
            if (c != 0.0) sum += c * prop.mean_at(i, t);
          }
        }
      } else {
        const auto y = simulate(env, g, w, rng);
        for (int i = 0; i < n; ++i) {
          for (int t = 0; t < horizon; ++t) {
            const double c = exposures.coefficient_packed(words, i, t);
            if (c != 0.0) sum += c * y.y(i, t);
          }
        }
      }
      estimates[r] = sum * scale;
    }
  };
  const int jobs = static_cast<int>(
      std::clamp<long>(options.jobs, 1, std::max<long>(1, reps)));
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
    for (auto& th : pool) th.join();
  }

  double sum = 0.0;
  for (double e : estimates) sum += e;
  const double mean = sum / static_cast<double>(reps);
  double m2 = 0.0;
  double m4 = 0.0;
  for (double e : estimates) {
    const double dev = (e - mean) * (e - mean);
    m2 += dev;
    m4 += dev * dev;
  }
  MomentReport rep;
  rep.mode = OracleMode::kMonteCarlo;
  rep.radius = radius;
  rep.n_individuals = n;
  rep.horizon = horizon;
  rep.mean_estimate = mean;
  rep.variance = m2 / static_cast<double>(reps - 1);
  rep.replications = reps;
  rep.rao_blackwell = options.rao_blackwell;
  rep.se_mean = std::sqrt(rep.variance / static_cast<double>(reps));
  const double pop_var = m2 / static_cast<double>(reps);
  rep.se_variance = std::sqrt(
      std::max(0.0, (m4 / static_cast<double>(reps) - pop_var * pop_var) /
                        static_cast<double>(reps)));
  rep.true_ate = true_ate(env, g);
  rep.bias = std::abs(rep.mean_estimate - rep.true_ate);
  return rep;
}

bool Ledger::all_pass() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const LedgerRow& r) { return r.verdict == Verdict::kPass; });
}

const LedgerRow* Ledger::find(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

namespace {

// Verdict for a Monte Carlo measurement against an upper bound.
Verdict mc_verdict(double measured, double se, double bound) {
  if (se > 0.1 * bound) return Verdict::kUnresolved;
  if (measured + 3.0 * se <= bound) return Verdict::kPass;
  if (measured - 3.0 * se > bound) return Verdict::kFail;
  return Verdict::kUnresolved;
}

LedgerRow scalar_row(std::string name, double measured, double bound,
                     OracleMode mode, double se) {
  LedgerRow row;
  row.name = std::move(name);
  row.measured = measured;
  row.bound = bound;
  row.margin = bound - measured;
  row.checked = 1;
  if (mode == OracleMode::kExact) {
    row.verdict = measured <= bound ? Verdict::kPass : Verdict::kFail;
  } else {
    row.verdict = mc_verdict(measured, se, bound);
    std::ostringstream os;
    os << "se=" << se;
    row.detail = os.str();
  }
  row.violations = row.verdict == Verdict::kFail ? 1 : 0;
  return row;
}

constexpr double kCovSlack = 1e-9;

}  // namespace

Ledger verify_bounds(const Environment& env, const GraphSequence& g,
                     const VerticalDesign& d, int radius,
                     const VerifyOptions& options) {
  Ledger ledger;
  ledger.mode = options.mode;
  ledger.bounds = bound_report(g, d, radius, env.t_mix(), env.sigma(),
                               options.constants);
  const int n = g.n_individuals();
  const int horizon = g.horizon();
  const int cells = n * horizon;
  const bool want_pairs = options.mode == OracleMode::kExact &&
                          cells <= options.max_pair_cells;
  if (options.mode == OracleMode::kExact) {
    ExactOptions ex = options.exact;
    ex.pair_cov = ex.pair_cov || want_pairs;
    ledger.moments = exact_moments(env, g, d, radius, ex);
  } else {
    ledger.moments = mc_moments(env, g, d, radius, options.mc);
  }
  const MomentReport& m = ledger.moments;
  const BoundReport& b = ledger.bounds;

  ledger.rows.push_back(
      scalar_row("bias", m.bias, b.bias_bound, options.mode, m.se_mean));
  ledger.rows.push_back(scalar_row("variance", m.variance, b.variance_bound,
                                   options.mode, m.se_variance));
  {
    LedgerRow row =
        scalar_row("mse", m.mse(), b.mse_bound, options.mode,
                   m.se_variance + 2.0 * m.bias * m.se_mean);
    const std::string regime = b.mse_regime ? "regime=auto" : "regime=off";
    row.detail = row.detail.empty() ? regime : regime + " " + row.detail;
    ledger.rows.push_back(row);
  }

  LedgerRow cov_row;
  cov_row.name = "covariance_lit";
  LedgerRow zero_row;
  zero_row.name = "never_interacting_zero";
  zero_row.bound = kCovSlack;
  if (m.has_pair_cov()) {
    const CigSequence cig = build_cig(g, d);
    const ExposureMap exposures(g, d, radius);
    const double constant =
        options.constants.covariance * (1.0 + env.sigma() * env.sigma());
    double worst_ratio = -1.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int tp = 0; tp < horizon; ++tp) {
          const auto tau = lit(cig, i, j, tp);
          for (int t = tp; t < horizon; ++t) {
            const double cov = std::abs(m.cov(i, t, j, tp));
            if (!tau) {
              ++zero_row.checked;
              if (cov > zero_row.measured) zero_row.measured = cov;
              if (cov > kCovSlack) ++zero_row.violations;
              continue;
            }
            const auto bound =
                cov_bound_lit(t, tp, tau, radius, exposures.probability(i, t),
                              exposures.probability(j, tp), env.t_mix(),
                              constant);
            if (!bound) continue;
            ++cov_row.checked;
            if (cov > *bound + kCovSlack) {
              if (cov_row.violations == 0) {
                std::ostringstream os;
                os << "first violation i=" << i + 1 << " t=" << t + 1
                   << " i'=" << j + 1 << " t'=" << tp + 1
                   << " lit=" << *tau + 1;
                cov_row.detail = os.str();
              }
              ++cov_row.violations;
            }
            const double ratio = *bound > 0.0 ? cov / *bound : 0.0;
            if (ratio > worst_ratio) {
              worst_ratio = ratio;
              cov_row.measured = cov;
              cov_row.bound = *bound;
            }
          }
        }
      }
    }
    cov_row.margin = cov_row.bound - cov_row.measured;
    if (cov_row.checked == 0) cov_row.detail = "no pairs in the applicable regime";
    cov_row.verdict =
        cov_row.violations == 0 ? Verdict::kPass : Verdict::kFail;
    zero_row.margin = zero_row.bound - zero_row.measured;
    zero_row.verdict =
        zero_row.violations == 0 ? Verdict::kPass : Verdict::kFail;
  } else {
    cov_row.detail = zero_row.detail = "pair covariances not computed";
  }
  ledger.rows.push_back(cov_row);
  ledger.rows.push_back(zero_row);

  LedgerRow lb_row;
  lb_row.name = "exposure_lower_bound";
  {
    const CigSequence cig = build_cig(g, d);
    const ExposureMap exposures(g, d, radius);
    lb_row.bound = 1.0;
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < horizon; ++t) {
        const double lb = exposure_lower_bound(cig, d, i, t, radius);
        const double p = exposures.probability(i, t);
        ++lb_row.checked;
        if (lb > p) ++lb_row.violations;
        if (p > 0.0) lb_row.measured = std::max(lb_row.measured, lb / p);
      }
    }
    lb_row.margin = lb_row.bound - lb_row.measured;
    lb_row.detail = "measured is max lower_bound / p";
    lb_row.verdict = lb_row.violations == 0 ? Verdict::kPass : Verdict::kFail;
  }
  ledger.rows.push_back(lb_row);
  return ledger;
}

}  // namespace dynint
