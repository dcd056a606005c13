#ifndef DYNINT_GRAPHS_HPP_
#define DYNINT_GRAPHS_HPP_

// Sequences of interference graphs G_1..G_T over N individuals.
//
// Individuals and rounds are 0-based in the C++ API. Text formats written by
// io.hpp use 1-based indices.

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace dynint {

// Undirected pair with a < b. Self-loops are implicit and never stored.
struct Edge {
  int a = 0;
  int b = 0;
  auto operator<=>(const Edge&) const = default;
};

struct SpaceTimePoint {
  int individual = 0;
  int round = 0;
  auto operator<=>(const SpaceTimePoint&) const = default;
};

class GraphSequence {
 public:
  GraphSequence() = default;
  // Pairs may be given in either orientation and with duplicates; they are
  // normalised. Throws std::invalid_argument on out-of-range or i == j pairs.
  GraphSequence(int n_individuals, int horizon,
                std::vector<std::vector<Edge>> edges_per_round);

  int n_individuals() const { return n_; }
  int horizon() const { return horizon_; }

  std::span<const Edge> edges(int t) const;
  // Neighbours of i at round t, excluding i itself, ascending.
  std::span<const int> neighbors(int i, int t) const;
  bool has_edge(int i, int j, int t) const;
  std::size_t total_edges() const;

  bool operator==(const GraphSequence& other) const {
    return n_ == other.n_ && horizon_ == other.horizon_ &&
           edges_ == other.edges_;
  }

 private:
  void check_cell(int i, int t) const;

  int n_ = 0;
  int horizon_ = 0;
  std::vector<std::vector<Edge>> edges_;
  std::vector<std::vector<int>> adjacency_;  // index t * n + i
};

// N_t(i): i together with its round-t neighbours, ascending.
std::vector<int> neighborhood(const GraphSequence& g, int i, int t);

// N^r(it) = union over tau in [max(0, t - r), t] of N_tau(i) x {tau}, sorted by
// (round, individual).
std::vector<SpaceTimePoint> spatio_temporal_neighborhood(const GraphSequence& g,
                                                         int i, int t,
                                                         int radius);

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

class TrajectorySet {
 public:
  TrajectorySet() = default;
  // positions[t * n + i]. Throws if a point leaves [0,1]^2 or a step exceeds
  // max_speed (with 1e-12 slack).
  TrajectorySet(int n_individuals, int horizon, std::vector<Point> positions,
                double max_speed);

  int n_individuals() const { return n_; }
  int horizon() const { return horizon_; }
  double max_speed() const { return max_speed_; }
  const Point& at(int i, int t) const {
    return positions_[static_cast<std::size_t>(t) * n_ + i];
  }

 private:
  int n_ = 0;
  int horizon_ = 0;
  std::vector<Point> positions_;
  double max_speed_ = 0.0;
};

struct ErParams {
  double p_init = 0.0;
  double p_birth = 0.0;
  double p_death = 0.0;
};

GraphSequence make_static(int n, int horizon, std::span<const Edge> base_edges);

// Each unordered pair follows an independent two-state chain: present at
// round 0 w.p. p_init, then born w.p. p_birth / dies w.p. p_death per round.
GraphSequence make_dynamic_er(int n, int horizon, const ErParams& params,
                              std::uint64_t seed);

// (i, j) in E_t iff |x_t(i) - x_t(j)| <= kappa (closed ball).
GraphSequence make_metric(const TrajectorySet& traj, double kappa);

// Uniform start in the unit square; each step uniform in the disk of radius
// v_max, folded back into the box by reflection.
TrajectorySet random_walk_trajectories(int n, int horizon, double v_max,
                                       std::uint64_t seed);

}  // namespace dynint

#endif  // DYNINT_GRAPHS_HPP_
