#include "dynint/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dynint/estimator.hpp"

namespace dynint {

CigSequence::CigSequence(int n_individuals, int block_len, int horizon,
                         std::vector<std::vector<int>> touched,
                         std::vector<std::vector<int>> adjacency)
    : n_(n_individuals),
      blocks_(time_block_count(horizon, block_len)),
      block_len_(block_len),
      horizon_(horizon),
      touched_(std::move(touched)),
      adjacency_(std::move(adjacency)) {
  const auto expected = static_cast<std::size_t>(blocks_) * n_;
  if (touched_.size() != expected || adjacency_.size() != expected) {
    throw std::invalid_argument("CIG tables must have one entry per (k, i)");
  }
}

bool CigSequence::has_edge(int k, int i, int j) const {
  if (i == j) return true;
  const auto nb = neighbors(k, i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

CigSequence build_cig(const GraphSequence& g, const VerticalDesign& d) {
  const int n = g.n_individuals();
  if (d.n_individuals() != n || d.horizon() != g.horizon()) {
    throw std::invalid_argument("graph and design dimensions disagree");
  }
  const int blocks = d.n_time_blocks();
  std::vector<std::vector<int>> touched(static_cast<std::size_t>(blocks) * n);
  std::vector<std::vector<int>> adjacency(touched.size());
  std::vector<std::vector<int>> by_block;
  for (int k = 0; k < blocks; ++k) {
    by_block.assign(d.partition(k).size(), {});
    for (int i = 0; i < n; ++i) {
      auto& tb = touched[static_cast<std::size_t>(k) * n + i];
      tb.push_back(d.spatial_block_of(k, i));
      for (int t = d.block_first(k); t <= d.block_last(k); ++t) {
        for (int j : g.neighbors(i, t)) tb.push_back(d.spatial_block_of(k, j));
      }
      std::sort(tb.begin(), tb.end());
      tb.erase(std::unique(tb.begin(), tb.end()), tb.end());
      for (int b : tb) by_block[b].push_back(i);
    }
    for (const auto& members : by_block) {
      for (int i : members) {
        auto& adj = adjacency[static_cast<std::size_t>(k) * n + i];
        for (int j : members) {
          if (j != i) adj.push_back(j);
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      auto& adj = adjacency[static_cast<std::size_t>(k) * n + i];
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
  }
  return CigSequence(n, d.block_len(), d.horizon(), std::move(touched),
                     std::move(adjacency));
}

int cluster_degree(const CigSequence& c, int i, int k) {
  if (i < 0 || i >= c.n_individuals() || k < 0 || k >= c.n_blocks()) {
    throw std::out_of_range("cluster_degree: index out of range");
  }
  return static_cast<int>(c.neighbors(k, i).size()) + 1;
}

std::vector<int> interaction_blocks(const CigSequence& c, int i, int j) {
  std::vector<int> out;
  for (int k = 0; k < c.n_blocks(); ++k) {
    if (c.has_edge(k, i, j)) out.push_back(k);
  }
  return out;
}

std::optional<int> lit(const CigSequence& c, int i, int j, int t) {
  if (t < 0 || t >= c.horizon()) throw std::out_of_range("lit: round");
  for (int k = t / c.block_len(); k >= 0; --k) {
    if (c.has_edge(k, i, j)) {
      return std::min(c.horizon(), (k + 1) * c.block_len()) - 1;
    }
  }
  return std::nullopt;
}

double exposure_lower_bound(const CigSequence& c, const VerticalDesign& d,
                            int i, int t, int radius) {
  const int first = d.time_block_of(std::max(0, t - radius));
  const int last = d.time_block_of(t);
  int total = 0;
  for (int k = first; k <= last; ++k) total += cluster_degree(c, i, k);
  return std::ldexp(1.0, -total);
}

double bias_bound(int radius, double t_mix, double constant) {
  if (radius < 0) throw std::invalid_argument("radius must be >= 0");
  return constant * std::exp(-radius / t_mix);
}

double variance_bound(double cd_avg, double p_min, int block_len, int radius,
                      double t_mix, double sigma, int n, int horizon,
                      double constant) {
  if (!(p_min > 0.0)) throw std::invalid_argument("p_min must be > 0");
  const double l = block_len;
  const double lr = l + radius;
  const double nt = static_cast<double>(n) * horizon;
  return constant * (1.0 + sigma * sigma) / (p_min * p_min) *
         (lr * lr / (l * nt) * cd_avg + std::exp(-radius / t_mix));
}

double mse_bound(double cd_avg, int cd_max, double t_mix, int n, int horizon,
                 double constant) {
  const double nt = static_cast<double>(n) * horizon;
  if (nt < 2) throw std::invalid_argument("mse_bound needs N*T >= 2");
  return constant * t_mix * std::log(nt) / nt * std::ldexp(1.0, 4 * cd_max) *
         cd_avg;
}

int auto_radius(double t_mix, int n, int horizon) {
  const double nt = static_cast<double>(n) * horizon;
  return std::max(1, static_cast<int>(std::ceil(2.0 * t_mix * std::log(nt))));
}

std::optional<double> cov_bound_lit(int t, int t_prime,
                                    std::optional<int> tau, int radius,
                                    double p, double p_prime, double t_mix,
                                    double constant) {
  if (t < t_prime) return std::nullopt;
  if (!tau) return 0.0;
  if (t < *tau + radius) return std::nullopt;
  return constant / (p * p_prime) *
         std::exp(-std::abs(t_prime - *tau) / t_mix);
}

std::vector<SchedulePair> close_pair_schedule(const CigSequence& c,
                                              int radius, int i, int j) {
  const auto blocks = interaction_blocks(c, i, j);
  const int l = c.block_len();
  std::vector<SchedulePair> out;
  for (int t = 0; t < c.horizon(); ++t) {
    for (int tp = 0; tp <= t; ++tp) {
      PairClass label = PairClass::kFar;
      for (int k : blocks) {
        // [(k-1) l, k l + r] in 1-based rounds with 1-based k = k + 1.
        const int lo = k * l - 1;
        const int hi = (k + 1) * l + radius - 1;
        if (tp >= lo && t <= hi) {
          label = PairClass::kClose;
          break;
        }
      }
      out.push_back({t, tp, label});
    }
  }
  return out;
}

double far_pair_bound(double p, double p_prime, int radius, double t_mix) {
  return std::exp(-radius / t_mix) / (p * p_prime);
}

BoundReport bound_report(const GraphSequence& g, const VerticalDesign& d,
                         int radius, double t_mix, double sigma,
                         const BoundConstants& constants) {
  BoundReport rep;
  rep.params = {d.block_len(), radius,           t_mix,    sigma,
                g.n_individuals(), g.horizon(), constants};
  const CigSequence cig = build_cig(g, d);
  const int n = g.n_individuals();
  long total = 0;
  for (int k = 0; k < cig.n_blocks(); ++k) {
    for (int i = 0; i < n; ++i) {
      const int cd = cluster_degree(cig, i, k);
      rep.cd.push_back(cd);
      total += cd;
      rep.cd_max = std::max(rep.cd_max, cd);
    }
  }
  rep.cd_avg = static_cast<double>(total) / static_cast<double>(rep.cd.size());
  const ExposureMap exposures(g, d, radius);
  rep.m_max = exposures.max_count();
  rep.p_min = exposures.min_probability();
  rep.bias_bound = bias_bound(radius, t_mix, constants.bias);
  rep.variance_bound =
      rep.p_min > 0.0
          ? variance_bound(rep.cd_avg, rep.p_min, d.block_len(), radius, t_mix,
                           sigma, n, g.horizon(), constants.variance)
          : HUGE_VAL;
  rep.mse_bound = static_cast<double>(n) * g.horizon() >= 2
                      ? mse_bound(rep.cd_avg, rep.cd_max, t_mix, n,
                                  g.horizon(), constants.mse)
                      : HUGE_VAL;
  const int a = auto_radius(t_mix, n, g.horizon());
  rep.mse_regime = d.block_len() == a && radius == a;
  return rep;
}

}  // namespace dynint
