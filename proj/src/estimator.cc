#include "dynint/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dynint {

int exposure_indicator(const GraphSequence& g, const AssignmentMatrix& w, int i,
                       int t, int arm, int radius) {
  for (const auto& p : spatio_temporal_neighborhood(g, i, t, radius)) {
    if (w.at(p.individual, p.round) != arm) return 0;
  }
  return 1;
}

double exposure_probability(const GraphSequence& g, const VerticalDesign& d,
                            int i, int t, int radius) {
  const auto pts = spatio_temporal_neighborhood(g, i, t, radius);
  const int m = static_cast<int>(clusters_touching(d, pts).size());
  return m > kMaxExactExposureCount ? 0.0 : std::ldexp(1.0, -m);
}

std::vector<std::uint64_t> pack_arms(std::span<const std::uint8_t> arms) {
  std::vector<std::uint64_t> words((arms.size() + 63) / 64, 0);
  for (std::size_t c = 0; c < arms.size(); ++c) {
    if (arms[c]) words[c / 64] |= std::uint64_t{1} << (c % 64);
  }
  return words;
}

ExposureMap::ExposureMap(const GraphSequence& g, const VerticalDesign& d,
                         int radius)
    : n_(g.n_individuals()),
      horizon_(g.horizon()),
      radius_(radius),
      n_clusters_(d.n_clusters()),
      words_((d.n_clusters() + 63) / 64) {
  if (d.n_individuals() != n_ || d.horizon() != horizon_) {
    throw std::invalid_argument("graph and design dimensions disagree");
  }
  if (radius < 0) throw std::invalid_argument("radius must be non-negative");
  offsets_.reserve(static_cast<std::size_t>(n_) * horizon_ + 1);
  offsets_.push_back(0);
  masks_.assign(static_cast<std::size_t>(n_) * horizon_ * words_, 0);
  for (int i = 0; i < n_; ++i) {
    for (int t = 0; t < horizon_; ++t) {
      const auto pts = spatio_temporal_neighborhood(g, i, t, radius);
      const auto touched = clusters_touching(d, pts);
      const std::size_t base = cell(i, t) * words_;
      for (int c : touched) {
        clusters_.push_back(c);
        masks_[base + c / 64] |= std::uint64_t{1} << (c % 64);
      }
      offsets_.push_back(clusters_.size());
    }
  }
}

std::span<const int> ExposureMap::touched(int i, int t) const {
  const std::size_t c = cell(i, t);
  return std::span<const int>(clusters_).subspan(offsets_[c],
                                                 offsets_[c + 1] - offsets_[c]);
}

double ExposureMap::probability(int i, int t) const {
  const int m = count(i, t);
  return m > kMaxExactExposureCount ? 0.0 : std::ldexp(1.0, -m);
}

int ExposureMap::max_count() const {
  int out = 0;
  for (std::size_t c = 0; c + 1 < offsets_.size(); ++c) {
    out = std::max(out, static_cast<int>(offsets_[c + 1] - offsets_[c]));
  }
  return out;
}

double ExposureMap::min_probability() const {
  const int m = max_count();
  return m > kMaxExactExposureCount ? 0.0 : std::ldexp(1.0, -m);
}

bool ExposureMap::exposed(std::span<const std::uint8_t> arms, int i, int t,
                          int arm) const {
  for (int c : touched(i, t)) {
    if (arms[c] != arm) return false;
  }
  return true;
}

double ExposureMap::coefficient(std::span<const std::uint8_t> arms, int i,
                                int t) const {
  const auto cl = touched(i, t);
  const int first = arms[cl.front()];
  for (int c : cl) {
    if (arms[c] != first) return 0.0;
  }
  const double inv_p = std::ldexp(1.0, static_cast<int>(cl.size()));
  return first == 1 ? inv_p : -inv_p;
}

std::pair<bool, bool> ExposureMap::exposures_packed(
    std::span<const std::uint64_t> words, int i, int t) const {
  const std::uint64_t* mask = masks_.data() + cell(i, t) * words_;
  bool all_one = true;
  bool all_zero = true;
  for (int k = 0; k < words_; ++k) {
    const std::uint64_t hit = words[k] & mask[k];
    all_one = all_one && hit == mask[k];
    all_zero = all_zero && hit == 0;
  }
  return {all_one, all_zero};
}

double ExposureMap::coefficient_packed(std::span<const std::uint64_t> words,
                                       int i, int t) const {
  const auto [x1, x0] = exposures_packed(words, i, t);
  if (x1 == x0) return 0.0;
  const double inv_p = std::ldexp(1.0, count(i, t));
  return x1 ? inv_p : -inv_p;
}

double HtReport::min_probability() const {
  return exposure_probs.empty()
             ? 1.0
             : *std::min_element(exposure_probs.begin(), exposure_probs.end());
}

int HtReport::max_count() const {
  return exposure_counts.empty()
             ? 0
             : *std::max_element(exposure_counts.begin(), exposure_counts.end());
}

bool HtReport::any_degenerate() const {
  return std::any_of(degenerate.begin(), degenerate.end(),
                     [](auto v) { return v != 0; });
}

HtReport ht_estimate(const GraphSequence& g, const VerticalDesign& d,
                     const AssignmentMatrix& w, const OutcomePanel& y,
                     int radius) {
  const int n = g.n_individuals();
  const int horizon = g.horizon();
  if (w.n_individuals() != n || w.horizon() != horizon ||
      y.n_individuals() != n || y.horizon() != horizon) {
    throw std::invalid_argument("ht_estimate: dimension mismatch");
  }
  const ExposureMap exposures(g, d, radius);
  HtReport report;
  report.radius = radius;
  report.n_individuals = n;
  report.horizon = horizon;
  const auto cells = static_cast<std::size_t>(n) * horizon;
  report.terms.resize(cells);
  report.exposure_probs.resize(cells);
  report.exposure_counts.resize(cells);
  report.degenerate.resize(cells);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < horizon; ++t) {
      const std::size_t c = static_cast<std::size_t>(i) * horizon + t;
      const int m = exposures.count(i, t);
      report.exposure_counts[c] = m;
      report.exposure_probs[c] = exposures.probability(i, t);
      const int x1 = exposure_indicator(g, w, i, t, 1, radius);
      const int x0 = exposure_indicator(g, w, i, t, 0, radius);
      double term = 0.0;
      if (exposures.degenerate(i, t)) {
        report.degenerate[c] = 1;
        term = std::numeric_limits<double>::quiet_NaN();
      } else if (x1 != x0) {
        term = (x1 - x0) / report.exposure_probs[c] * y.y(i, t);
      }
      report.terms[c] = term;
      sum += term;
    }
  }
  report.estimate = sum / static_cast<double>(cells);
  return report;
}

}  // namespace dynint
