#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace dynint::testing {

Partition random_partition(int n, int blocks, Engine& rng) {
  std::uniform_int_distribution<int> pick(0, blocks - 1);
  std::vector<std::vector<int>> by_label(blocks);
  for (int i = 0; i < n; ++i) by_label[pick(rng)].push_back(i);
  Partition p;
  for (auto& b : by_label) {
    if (!b.empty()) p.push_back(std::move(b));
  }
  return p;
}

std::optional<VerticalDesign> random_design(int n, int horizon, int block_len,
                                            int max_clusters, Engine& rng) {
  const int blocks = (horizon + block_len - 1) / block_len;
  if (blocks > max_clusters) return std::nullopt;
  int spare = max_clusters - blocks;
  std::vector<Partition> parts;
  for (int k = 0; k < blocks; ++k) {
    const int cap = std::min(n, 1 + spare);
    std::uniform_int_distribution<int> count(1, cap);
    Partition p = random_partition(n, count(rng), rng);
    spare -= static_cast<int>(p.size()) - 1;
    parts.push_back(std::move(p));
  }
  return VerticalDesign(n, horizon, block_len, std::move(parts));
}

GraphSequence random_graphs(int n, int horizon, Engine& rng) {
  std::uniform_real_distribution<double> unif(0.0, 0.6);
  const ErParams params{unif(rng), unif(rng), unif(rng)};
  return make_dynamic_er(n, horizon, params, rng());
}

Instance small_instance(std::uint64_t seed, int max_n, int max_t,
                        int max_clusters) {
  Engine rng = make_engine(seed, 99);
  Instance inst;
  inst.seed = seed;
  std::uniform_int_distribution<int> pick_n(1, max_n);
  std::uniform_int_distribution<int> pick_t(2, max_t);
  const int n = pick_n(rng);
  const int horizon = pick_t(rng);
  inst.g = random_graphs(n, horizon, rng);
  const double t_mixes[] = {0.5, 1.0, 2.0, 4.0};
  const double sigmas[] = {0.0, 0.5};
  const double t_mix = t_mixes[rng() % 4];
  const double sigma = sigmas[rng() % 2];
  inst.env = build_env(random_environment_spec(2, t_mix, sigma, rng));
  std::uniform_int_distribution<int> pick_l(1, horizon);
  for (;;) {
    auto d = random_design(n, horizon, pick_l(rng), max_clusters, rng);
    if (d) {
      inst.d = std::move(*d);
      break;
    }
  }
  inst.radius = static_cast<int>(rng() % 7);
  return inst;
}

Instance auto_variant(const Instance& base, int max_clusters) {
  Instance inst = base;
  const int n = base.g.n_individuals();
  const int horizon = base.g.horizon();
  const double nt = static_cast<double>(n) * horizon;
  const int l = std::max(
      1, static_cast<int>(std::ceil(2.0 * base.env.t_mix() * std::log(nt))));
  Engine rng = make_engine(base.seed, 101);
  auto d = random_design(n, horizon, l, max_clusters, rng);
  if (!d) throw std::logic_error("auto variant has too many time blocks");
  inst.d = std::move(*d);
  inst.radius = l;
  return inst;
}

namespace {

std::vector<int> union_neighbourhood(const GraphSequence& g, int i, int first,
                                     int last) {
  std::vector<int> out;
  for (int u = 0; u < g.n_individuals(); ++u) {
    bool hit = u == i;
    for (int t = first; t <= last && !hit; ++t) hit = g.has_edge(i, u, t);
    if (hit) out.push_back(u);
  }
  return out;
}

bool in_block(const std::vector<int>& block, int u) {
  return std::find(block.begin(), block.end(), u) != block.end();
}

}  // namespace

bool brute_cig_edge(const GraphSequence& g, const VerticalDesign& d, int k,
                    int i, int j) {
  const int first = k * d.block_len();
  const int last = std::min(g.horizon(), (k + 1) * d.block_len()) - 1;
  const auto ui = union_neighbourhood(g, i, first, last);
  const auto uj = union_neighbourhood(g, j, first, last);
  for (const auto& block : d.partition(k)) {
    bool meets_i = false;
    bool meets_j = false;
    for (int u : ui) meets_i = meets_i || in_block(block, u);
    for (int u : uj) meets_j = meets_j || in_block(block, u);
    if (meets_i && meets_j) return true;
  }
  return false;
}

int brute_touched_count(const GraphSequence& g, const VerticalDesign& d, int i,
                        int t, int radius) {
  std::set<std::pair<int, int>> clusters;
  for (int tau = std::max(0, t - radius); tau <= t; ++tau) {
    const int k = tau / d.block_len();
    for (int u = 0; u < g.n_individuals(); ++u) {
      if (u != i && !g.has_edge(i, u, tau)) continue;
      const auto& p = d.partition(k);
      for (int b = 0; b < static_cast<int>(p.size()); ++b) {
        if (in_block(p[b], u)) clusters.insert({k, b});
      }
    }
  }
  return static_cast<int>(clusters.size());
}

BruteMoments brute_moments(const Environment& env, const GraphSequence& g,
                           const VerticalDesign& d, int radius) {
  const int n = g.n_individuals();
  const int horizon = g.horizon();
  const int s = env.n_states();
  const int cells = n * horizon;
  const double scale = 1.0 / cells;
  const int clusters = d.n_clusters();
  if (clusters > 16 || std::pow(s, cells) > 1 << 16) {
    throw std::logic_error("instance too large for path enumeration");
  }
  long long paths = 1;
  for (int c = 0; c < cells; ++c) paths *= s;

  double sum_first = 0.0;
  double sum_second = 0.0;
  for (long long mask = 0; mask < (1LL << clusters); ++mask) {
    std::vector<std::uint8_t> arms(clusters);
    for (int c = 0; c < clusters; ++c) arms[c] = (mask >> c) & 1;
    const AssignmentMatrix w = assignment_from_arms(d, arms);
    std::vector<double> coef(cells, 0.0);
    std::vector<ArmContext> ctx(cells);
    double noise = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < horizon; ++t) {
        ctx[i * horizon + t] = arm_context(g, w, i, t);
        int x1 = 1;
        int x0 = 1;
        for (int tau = std::max(0, t - radius); tau <= t; ++tau) {
          for (int u = 0; u < n; ++u) {
            if (u != i && !g.has_edge(i, u, tau)) continue;
            x1 = x1 && w.at(u, tau) == 1;
            x0 = x0 && w.at(u, tau) == 0;
          }
        }
        const double inv_p =
            std::ldexp(1.0, brute_touched_count(g, d, i, t, radius));
        coef[i * horizon + t] = (x1 - x0) * inv_p;
        noise += coef[i * horizon + t] * coef[i * horizon + t];
      }
    }
    double first = 0.0;
    double second = 0.0;
    std::vector<int> state(cells);
    for (long long path = 0; path < paths; ++path) {
      long long rest = path;
      for (int c = 0; c < cells; ++c) {
        state[c] = static_cast<int>(rest % s);
        rest /= s;
      }
      double prob = 1.0;
      double est = 0.0;
      for (int i = 0; i < n && prob > 0.0; ++i) {
        prob *= env.initial()(state[i * horizon]);
        for (int t = 0; t < horizon; ++t) {
          const int c = i * horizon + t;
          est += coef[c] * env.outcome(ctx[c], state[c]);
          if (t + 1 < horizon) {
            prob *= env.kernel(ctx[c])(state[c], state[c + 1]);
          }
        }
      }
      first += prob * est * scale;
      second += prob * est * est * scale * scale;
    }
    sum_first += first;
    sum_second += second + env.sigma() * env.sigma() * noise * scale * scale;
  }
  const double count = std::ldexp(1.0, clusters);
  BruteMoments out;
  out.mean = sum_first / count;
  out.variance = sum_second / count - out.mean * out.mean;
  return out;
}

double product_chain_cross_moment(const Environment& env,
                                  const GraphSequence& g,
                                  const AssignmentMatrix& w, int i, int t,
                                  int j, int tp) {
  const int s = env.n_states();
  // Joint law as an s x s matrix: row = state of i, column = state of j.
  Eigen::MatrixXd joint =
      env.initial().transpose() * env.initial();  // outer product
  auto step = [&](const Eigen::MatrixXd& m, int tau) {
    const Eigen::MatrixXd ki = env.kernel(arm_context(g, w, i, tau));
    const Eigen::MatrixXd kj = env.kernel(arm_context(g, w, j, tau));
    return Eigen::MatrixXd(ki.transpose() * m * kj);
  };
  auto mu = [&](int who, int tau) {
    return Eigen::VectorXd(env.outcome_values(arm_context(g, w, who, tau)));
  };
  const int early = std::min(t, tp);
  const int late = std::max(t, tp);
  for (int tau = 0; tau < early; ++tau) joint = step(joint, tau);
  // Weight by the outcome of whichever individual is observed first.
  Eigen::MatrixXd h = joint;
  if (t <= tp) {
    h = mu(i, early).asDiagonal() * h;
  } else {
    h = h * mu(j, early).asDiagonal();
  }
  for (int tau = early; tau < late; ++tau) h = step(h, tau);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(s);
  if (t <= tp) return ones.dot(h * mu(j, late));
  return mu(i, late).dot(h * ones);
}

}  // namespace dynint::testing
