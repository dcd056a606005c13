#ifndef DYNINT_ESTIMATOR_HPP_
#define DYNINT_ESTIMATOR_HPP_

// Exposure mappings and the truncated Horvitz-Thompson estimator.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dynint/design.hpp"
#include "dynint/env.hpp"
#include "dynint/graphs.hpp"

namespace dynint {

// Beyond this many touched clusters 2^-m is no longer a normal double.
inline constexpr int kMaxExactExposureCount = 1022;

// X^r_{ita}(w) = 1 iff w equals `arm` on all of N^r(it). Evaluated on the
// assignment cells directly.
int exposure_indicator(const GraphSequence& g, const AssignmentMatrix& w, int i,
                       int t, int arm, int radius);

// p^r_it = 2^-m where m counts the clusters touched by N^r(it). Returns 0 for
// degenerate cells (m > kMaxExactExposureCount).
double exposure_probability(const GraphSequence& g, const VerticalDesign& d,
                            int i, int t, int radius);

std::vector<std::uint64_t> pack_arms(std::span<const std::uint8_t> arms);

// Touched-cluster sets of every cell for one radius, precomputed so that
// exposures can be evaluated from cluster arms alone.
class ExposureMap {
 public:
  ExposureMap(const GraphSequence& g, const VerticalDesign& d, int radius);

  int radius() const { return radius_; }
  int n_individuals() const { return n_; }
  int horizon() const { return horizon_; }
  int n_clusters() const { return n_clusters_; }

  std::span<const int> touched(int i, int t) const;
  int count(int i, int t) const { return static_cast<int>(touched(i, t).size()); }
  bool degenerate(int i, int t) const {
    return count(i, t) > kMaxExactExposureCount;
  }
  double probability(int i, int t) const;
  int max_count() const;
  double min_probability() const;

  bool exposed(std::span<const std::uint8_t> arms, int i, int t, int arm) const;
  // (X_it1 - X_it0) / p_it.
  double coefficient(std::span<const std::uint8_t> arms, int i, int t) const;
  // Same, with arms packed 64 per word by pack_arms().
  double coefficient_packed(std::span<const std::uint64_t> words, int i,
                            int t) const;
  // (X_it1, X_it0) from packed arms.
  std::pair<bool, bool> exposures_packed(std::span<const std::uint64_t> words,
                                         int i, int t) const;

 private:
  std::size_t cell(int i, int t) const {
    return static_cast<std::size_t>(i) * horizon_ + t;
  }

  int n_ = 0;
  int horizon_ = 0;
  int radius_ = 0;
  int n_clusters_ = 0;
  int words_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<int> clusters_;
  std::vector<std::uint64_t> masks_;  // cell * words_ + word
};

struct HtReport {
  int radius = 0;
  int n_individuals = 0;
  int horizon = 0;
  std::vector<double> terms;            // i * horizon + t
  std::vector<double> exposure_probs;   // p^r_it
  std::vector<int> exposure_counts;     // m
  std::vector<std::uint8_t> degenerate;
  double estimate = 0.0;

  double term(int i, int t) const {
    return terms[static_cast<std::size_t>(i) * horizon + t];
  }
  double min_probability() const;
  int max_count() const;
  bool any_degenerate() const;
};

// Delta_it = (X_it1 - X_it0) / p_it * Y_it, estimate = mean over cells.
// Degenerate cells carry NaN terms (and hence a NaN estimate).
HtReport ht_estimate(const GraphSequence& g, const VerticalDesign& d,
                     const AssignmentMatrix& w, const OutcomePanel& y,
                     int radius);

}  // namespace dynint

#endif  // DYNINT_ESTIMATOR_HPP_
