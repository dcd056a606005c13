#ifndef DYNINT_ANALYSIS_HPP_
#define DYNINT_ANALYSIS_HPP_

// Clustering-induced graphs, cluster degrees, last interaction times and the
// closed-form bounds evaluated against the oracle.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynint/design.hpp"
#include "dynint/graphs.hpp"

namespace dynint {

// H_k for every time block k. (i, i') is an edge of H_k iff the block-k union
// neighbourhoods of i and i' meet a common spatial block of Pi_k. Self-edges
// are implicit and not stored.
class CigSequence {
 public:
  CigSequence() = default;
  CigSequence(int n_individuals, int block_len, int horizon,
              std::vector<std::vector<int>> touched,
              std::vector<std::vector<int>> adjacency);

  int n_individuals() const { return n_; }
  int n_blocks() const { return blocks_; }
  int block_len() const { return block_len_; }
  int horizon() const { return horizon_; }

  // Spatial blocks of Pi_k met by the block-k union neighbourhood of i.
  std::span<const int> touched(int k, int i) const {
    return touched_[index(k, i)];
  }
  // CIG neighbours of i in H_k, ascending, i excluded.
  std::span<const int> neighbors(int k, int i) const {
    return adjacency_[index(k, i)];
  }
  bool has_edge(int k, int i, int j) const;

 private:
  std::size_t index(int k, int i) const {
    return static_cast<std::size_t>(k) * n_ + i;
  }

  int n_ = 0;
  int blocks_ = 0;
  int block_len_ = 1;
  int horizon_ = 0;
  std::vector<std::vector<int>> touched_;
  std::vector<std::vector<int>> adjacency_;
};

CigSequence build_cig(const GraphSequence& g, const VerticalDesign& d);

// CD_k(i): degree in H_k counting the self-edge, so always >= 1.
int cluster_degree(const CigSequence& c, int i, int k);

// K_{i,i'}: blocks whose CIG joins i and i' (every block when i == i').
std::vector<int> interaction_blocks(const CigSequence& c, int i, int j);

// Last round of the latest block k' <= block(t) with (i, i') in H_k', or
// nullopt when there is none. The end of the final block is clamped to T.
std::optional<int> lit(const CigSequence& c, int i, int j, int t);

// 2^-(sum of CD_k(i) over blocks meeting [t - r, t]), rounds clamped at 0.
double exposure_lower_bound(const CigSequence& c, const VerticalDesign& d,
                            int i, int t, int radius);

struct BoundConstants {
  double bias = 2.0;
  // Covariance constant is this factor times (1 + sigma^2).
  double covariance = 4.0;
  double variance = 4.0;
  double mse = 4.0;
};

double bias_bound(int radius, double t_mix, double constant = 2.0);

// constant * (1 + sigma^2) / p_min^2 *
//     ((l + r)^2 / (l N T) * cd_avg + exp(-r / t_mix)).
double variance_bound(double cd_avg, double p_min, int block_len, int radius,
                      double t_mix, double sigma, int n, int horizon,
                      double constant = 4.0);

// constant * t_mix * log(NT) / (NT) * 2^(4 cd_max) * cd_avg.
double mse_bound(double cd_avg, int cd_max, double t_mix, int n, int horizon,
                 double constant = 4.0);

// ceil(2 t_mix log(NT)), at least 1.
int auto_radius(double t_mix, int n, int horizon);

// Bound on |Cov(Delta_it, Delta_i't')| for t >= t'. nullopt outside the regime
// t >= max(t', tau + r); 0 when the pair never interacted by t'.
std::optional<double> cov_bound_lit(int t, int t_prime,
                                    std::optional<int> tau, int radius,
                                    double p, double p_prime, double t_mix,
                                    double constant);

enum class PairClass { kClose, kFar };

struct SchedulePair {
  int t = 0;
  int t_prime = 0;
  PairClass label = PairClass::kFar;
};

// Every ordered pair t' <= t. CLOSE when some k in K_{i,i'} has the extended
// interval [(k-1) l, k l + r] (1-based rounds) containing both t and t'.
std::vector<SchedulePair> close_pair_schedule(const CigSequence& c,
                                              int radius, int i, int j);

// exp(-r / t_mix) / (p p'), the covariance bound attached to FAR pairs.
double far_pair_bound(double p, double p_prime, int radius, double t_mix);

struct BoundParams {
  int block_len = 1;
  int radius = 0;
  double t_mix = 1.0;
  double sigma = 0.0;
  int n_individuals = 0;
  int horizon = 0;
  BoundConstants constants;
};

struct BoundReport {
  BoundParams params;
  std::vector<int> cd;  // k * N + i
  double cd_avg = 0.0;
  int cd_max = 0;
  double p_min = 1.0;
  int m_max = 0;
  double bias_bound = 0.0;
  double variance_bound = 0.0;
  double mse_bound = 0.0;
  // l == r == ceil(2 t_mix log NT), where the MSE form applies.
  bool mse_regime = false;

  int cd_at(int k, int i) const {
    return cd[static_cast<std::size_t>(k) * params.n_individuals + i];
  }
};

BoundReport bound_report(const GraphSequence& g, const VerticalDesign& d,
                         int radius, double t_mix, double sigma,
                         const BoundConstants& constants = {});

}  // namespace dynint

#endif  // DYNINT_ANALYSIS_HPP_
