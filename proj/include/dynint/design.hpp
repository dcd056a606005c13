#ifndef DYNINT_DESIGN_HPP_
#define DYNINT_DESIGN_HPP_

// Vertical designs: time is cut into blocks of length block_len (the last
// block may be shorter), each block k carries its own partition of the
// individuals, and every (spatial block x time block) rectangle is a cluster
// that receives one fair-coin arm.

#include <cstdint>
#include <span>
#include <vector>

#include "dynint/graphs.hpp"
#include "dynint/rng.hpp"

namespace dynint {

using Partition = std::vector<std::vector<int>>;

struct ClusterKey {
  int time_block = 0;
  int spatial_block = 0;
};

class VerticalDesign {
 public:
  VerticalDesign() = default;
  // partitions.size() must equal ceil(horizon / block_len). Each partition is
  // canonicalised: members ascending, blocks ordered by smallest member.
  VerticalDesign(int n_individuals, int horizon, int block_len,
                 std::vector<Partition> partitions);

  int n_individuals() const { return n_; }
  int horizon() const { return horizon_; }
  int block_len() const { return block_len_; }
  int n_time_blocks() const { return static_cast<int>(partitions_.size()); }
  int n_clusters() const { return static_cast<int>(keys_.size()); }

  int time_block_of(int t) const { return t / block_len_; }
  int block_first(int k) const { return k * block_len_; }
  int block_last(int k) const;

  const Partition& partition(int k) const { return partitions_.at(k); }
  int spatial_block_of(int k, int i) const {
    return labels_[static_cast<std::size_t>(k) * n_ + i];
  }
  int cluster_id(int k, int spatial_block) const {
    return offsets_[k] + spatial_block;
  }
  // C[i,t].
  int cluster_of(int i, int t) const {
    const int k = time_block_of(t);
    return offsets_[k] + spatial_block_of(k, i);
  }
  const ClusterKey& key(int cluster) const { return keys_.at(cluster); }
  const std::vector<int>& members(int cluster) const;

 private:
  int n_ = 0;
  int horizon_ = 0;
  int block_len_ = 1;
  std::vector<Partition> partitions_;
  std::vector<int> labels_;   // k * n + i -> spatial block index
  std::vector<int> offsets_;  // first cluster id of time block k
  std::vector<ClusterKey> keys_;
};

VerticalDesign make_design(int n_individuals, int horizon, int block_len,
                           std::vector<Partition> partitions);

// Same partition builder applied to every time block.
VerticalDesign make_uniform_design(int n_individuals, int horizon,
                                   int block_len, const Partition& partition);

int time_block_count(int horizon, int block_len);

Partition singleton_partition(int n);
Partition single_block_partition(int n);
// Half-open grid cells of side cell_side over the unit square; a coordinate
// on a cell boundary goes to the higher cell, except that the far edge of the
// box stays in the last cell. Empty cells are omitted.
Partition region_partition(const TrajectorySet& traj, int t_anchor,
                           double cell_side);
// Connected components of the union graph of rounds [first, last].
Partition component_partition(const GraphSequence& g, int first, int last);

// Region-based design: block k is partitioned by position at its first round.
VerticalDesign make_region_design(const TrajectorySet& traj, int block_len,
                                  double cell_side);
VerticalDesign make_component_design(const GraphSequence& g, int block_len);

class AssignmentMatrix {
 public:
  AssignmentMatrix() = default;
  AssignmentMatrix(int n_individuals, int horizon,
                   std::vector<std::uint8_t> cells,
                   std::vector<std::uint8_t> cluster_arms);

  int n_individuals() const { return n_; }
  int horizon() const { return horizon_; }
  int at(int i, int t) const {
    return w_[static_cast<std::size_t>(i) * horizon_ + t];
  }
  std::span<const std::uint8_t> cells() const { return w_; }
  std::span<const std::uint8_t> cluster_arms() const { return arms_; }

  static AssignmentMatrix constant(int n_individuals, int horizon, int arm);

 private:
  int n_ = 0;
  int horizon_ = 0;
  std::vector<std::uint8_t> w_;  // i * horizon + t
  std::vector<std::uint8_t> arms_;
};

// W_it = Z_{C[i,t]}.
AssignmentMatrix assignment_from_arms(const VerticalDesign& d,
                                      std::vector<std::uint8_t> arms);

// Arms in cluster-id order, one fair bit per cluster taken from successive
// 64-bit engine outputs.
std::vector<std::uint8_t> sample_cluster_arms(const VerticalDesign& d,
                                              Engine& rng);
AssignmentMatrix sample_assignment(const VerticalDesign& d, std::uint64_t seed);

// Clusters meeting the given space-time points, ascending.
std::vector<int> clusters_touching(const VerticalDesign& d,
                                   std::span<const SpaceTimePoint> pts);

}  // namespace dynint

#endif  // DYNINT_DESIGN_HPP_
