#include "dynint/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "dynint/rng.hpp"

namespace dynint {
namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
  }
}

void check_dimensions(int n, int horizon) {
  if (n < 1) throw std::invalid_argument("need at least one individual");
  if (horizon < 1) throw std::invalid_argument("need at least one round");
}

// Fold a coordinate back into [0,1]. Reflection is 1-Lipschitz, so it never
// lengthens a step.
double reflect(double v) {
  while (v < 0.0 || v > 1.0) {
    if (v < 0.0) v = -v;
    if (v > 1.0) v = 2.0 - v;
  }
  return v;
}

}  // namespace

GraphSequence::GraphSequence(int n_individuals, int horizon,
                             std::vector<std::vector<Edge>> edges_per_round)
    : n_(n_individuals), horizon_(horizon), edges_(std::move(edges_per_round)) {
  check_dimensions(n_, horizon_);
  if (static_cast<int>(edges_.size()) != horizon_) {
    throw std::invalid_argument("edge list count must equal the horizon");
  }
  adjacency_.assign(static_cast<std::size_t>(n_) * horizon_, {});
  for (int t = 0; t < horizon_; ++t) {
    auto& round = edges_[t];
    for (auto& e : round) {
      if (e.a == e.b) {
        throw std::invalid_argument("self-loops are implicit; got pair (" +
                                    std::to_string(e.a + 1) + "," +
                                    std::to_string(e.b + 1) + ")");
      }
      if (e.a > e.b) std::swap(e.a, e.b);
      if (e.a < 0 || e.b >= n_) {
        throw std::invalid_argument("pair index out of range at round " +
                                    std::to_string(t + 1));
      }
    }
    std::sort(round.begin(), round.end());
    round.erase(std::unique(round.begin(), round.end()), round.end());
    for (const auto& e : round) {
      adjacency_[static_cast<std::size_t>(t) * n_ + e.a].push_back(e.b);
      adjacency_[static_cast<std::size_t>(t) * n_ + e.b].push_back(e.a);
    }
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

void GraphSequence::check_cell(int i, int t) const {
  if (i < 0 || i >= n_ || t < 0 || t >= horizon_) {
    throw std::out_of_range("(individual, round) = (" + std::to_string(i) +
                            ", " + std::to_string(t) + ") out of range");
  }
}

std::span<const Edge> GraphSequence::edges(int t) const {
  if (t < 0 || t >= horizon_) throw std::out_of_range("round out of range");
  return edges_[t];
}

std::span<const int> GraphSequence::neighbors(int i, int t) const {
  check_cell(i, t);
  return adjacency_[static_cast<std::size_t>(t) * n_ + i];
}

bool GraphSequence::has_edge(int i, int j, int t) const {
  const auto nb = neighbors(i, t);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::size_t GraphSequence::total_edges() const {
  std::size_t total = 0;
  for (const auto& round : edges_) total += round.size();
  return total;
}

std::vector<int> neighborhood(const GraphSequence& g, int i, int t) {
  const auto nb = g.neighbors(i, t);
  std::vector<int> out(nb.begin(), nb.end());
  out.insert(std::lower_bound(out.begin(), out.end(), i), i);
  return out;
}

std::vector<SpaceTimePoint> spatio_temporal_neighborhood(const GraphSequence& g,
                                                         int i, int t,
                                                         int radius) {
  if (radius < 0) throw std::invalid_argument("radius must be non-negative");
  std::vector<SpaceTimePoint> out;
  for (int tau = std::max(0, t - radius); tau <= t; ++tau) {
    for (int j : neighborhood(g, i, tau)) out.push_back({j, tau});
  }
  return out;
}

TrajectorySet::TrajectorySet(int n_individuals, int horizon,
                             std::vector<Point> positions, double max_speed)
    : n_(n_individuals),
      horizon_(horizon),
      positions_(std::move(positions)),
      max_speed_(max_speed) {
  check_dimensions(n_, horizon_);
  if (!(max_speed_ >= 0.0)) throw std::invalid_argument("max_speed must be >= 0");
  if (positions_.size() != static_cast<std::size_t>(n_) * horizon_) {
    throw std::invalid_argument("trajectory size must be N * T");
  }
  for (const auto& p : positions_) {
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
      throw std::invalid_argument("trajectory point outside the unit square");
    }
  }
  for (int t = 1; t < horizon_; ++t) {
    for (int i = 0; i < n_; ++i) {
      const Point& a = at(i, t - 1);
      const Point& b = at(i, t);
      if (std::hypot(b.x - a.x, b.y - a.y) > max_speed_ + 1e-12) {
        throw std::invalid_argument("step of individual " +
                                    std::to_string(i + 1) +
                                    " exceeds max_speed at round " +
                                    std::to_string(t + 1));
      }
    }
  }
}

GraphSequence make_static(int n, int horizon, std::span<const Edge> base_edges) {
  check_dimensions(n, horizon);
  std::vector<Edge> base(base_edges.begin(), base_edges.end());
  return GraphSequence(n, horizon,
                       std::vector<std::vector<Edge>>(horizon, base));
}

GraphSequence make_dynamic_er(int n, int horizon, const ErParams& params,
                              std::uint64_t seed) {
  check_dimensions(n, horizon);
  check_probability(params.p_init, "p_init");
  check_probability(params.p_birth, "p_birth");
  check_probability(params.p_death, "p_death");

  Engine rng = make_engine(seed, kStreamGraph);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t n_pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
  std::vector<char> present(n_pairs, 0);
  std::vector<std::vector<Edge>> rounds(horizon);
  for (int t = 0; t < horizon; ++t) {
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b, ++idx) {
        const double u = unif(rng);
        if (t == 0) {
          present[idx] = u < params.p_init;
        } else if (present[idx]) {
          present[idx] = !(u < params.p_death);
        } else {
          present[idx] = u < params.p_birth;
        }
        if (present[idx]) rounds[t].push_back({a, b});
      }
    }
  }
  return GraphSequence(n, horizon, std::move(rounds));
}

GraphSequence make_metric(const TrajectorySet& traj, double kappa) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be >= 0");
  const int n = traj.n_individuals();
  std::vector<std::vector<Edge>> rounds(traj.horizon());
  for (int t = 0; t < traj.horizon(); ++t) {
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        const Point& p = traj.at(a, t);
        const Point& q = traj.at(b, t);
        if (std::hypot(p.x - q.x, p.y - q.y) <= kappa) rounds[t].push_back({a, b});
      }
    }
  }
  return GraphSequence(n, traj.horizon(), std::move(rounds));
}

TrajectorySet random_walk_trajectories(int n, int horizon, double v_max,
                                       std::uint64_t seed) {
  check_dimensions(n, horizon);
  if (!(v_max >= 0.0)) throw std::invalid_argument("v_max must be >= 0");
  Engine rng = make_engine(seed, kStreamTrajectory);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Point> pos(static_cast<std::size_t>(n) * horizon);
  for (int i = 0; i < n; ++i) {
    const double x = unif(rng);
    pos[i] = {x, unif(rng)};
  }
  for (int t = 1; t < horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      const Point& prev = pos[static_cast<std::size_t>(t - 1) * n + i];
      const double radius = v_max * std::sqrt(unif(rng));
      const double angle = 2.0 * std::numbers::pi * unif(rng);
      pos[static_cast<std::size_t>(t) * n + i] = {
          reflect(prev.x + radius * std::cos(angle)),
          reflect(prev.y + radius * std::sin(angle))};
    }
  }
  return TrajectorySet(n, horizon, std::move(pos), v_max);
}

}  // namespace dynint
