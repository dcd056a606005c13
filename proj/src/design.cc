#include "dynint/design.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dynint {
namespace {

void canonicalise(Partition& p) {
  for (auto& block : p) std::sort(block.begin(), block.end());
  std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) {
    return a.front() < b.front();
  });
}

struct DisjointSets {
  explicit DisjointSets(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<int> parent;
};

}  // namespace

int time_block_count(int horizon, int block_len) {
  if (block_len < 1) throw std::invalid_argument("block_len must be >= 1");
  return (horizon + block_len - 1) / block_len;
}

VerticalDesign::VerticalDesign(int n_individuals, int horizon, int block_len,
                               std::vector<Partition> partitions)
    : n_(n_individuals),
      horizon_(horizon),
      block_len_(block_len),
      partitions_(std::move(partitions)) {
  if (n_ < 1 || horizon_ < 1) {
    throw std::invalid_argument("design needs N >= 1 and T >= 1");
  }
  const int blocks = time_block_count(horizon_, block_len_);
  if (static_cast<int>(partitions_.size()) != blocks) {
    throw std::invalid_argument("expected " + std::to_string(blocks) +
                                " partitions, got " +
                                std::to_string(partitions_.size()));
  }
  labels_.assign(static_cast<std::size_t>(blocks) * n_, -1);
  for (int k = 0; k < blocks; ++k) {
    Partition& p = partitions_[k];
    if (p.empty()) {
      throw std::invalid_argument("partition of time block " +
                                  std::to_string(k + 1) + " is empty");
    }
    for (const auto& block : p) {
      if (block.empty()) {
        throw std::invalid_argument("partition of time block " +
                                    std::to_string(k + 1) +
                                    " has an empty block");
      }
    }
    canonicalise(p);
    for (int b = 0; b < static_cast<int>(p.size()); ++b) {
      for (int i : p[b]) {
        if (i < 0 || i >= n_) {
          throw std::invalid_argument("partition member out of range");
        }
        int& label = labels_[static_cast<std::size_t>(k) * n_ + i];
        if (label != -1) {
          throw std::invalid_argument(
              "individual " + std::to_string(i + 1) +
              " appears twice in partition of time block " +
              std::to_string(k + 1));
        }
        label = b;
      }
    }
    for (int i = 0; i < n_; ++i) {
      if (labels_[static_cast<std::size_t>(k) * n_ + i] == -1) {
        throw std::invalid_argument(
            "individual " + std::to_string(i + 1) +
            " missing from partition of time block " + std::to_string(k + 1));
      }
    }
    offsets_.push_back(static_cast<int>(keys_.size()));
    for (int b = 0; b < static_cast<int>(p.size()); ++b) keys_.push_back({k, b});
  }
}

int VerticalDesign::block_last(int k) const {
  return std::min(horizon_, (k + 1) * block_len_) - 1;
}

const std::vector<int>& VerticalDesign::members(int cluster) const {
  const ClusterKey& c = keys_.at(cluster);
  return partitions_[c.time_block][c.spatial_block];
}

VerticalDesign make_design(int n_individuals, int horizon, int block_len,
                           std::vector<Partition> partitions) {
  return VerticalDesign(n_individuals, horizon, block_len,
                        std::move(partitions));
}

VerticalDesign make_uniform_design(int n_individuals, int horizon,
                                   int block_len, const Partition& partition) {
  return VerticalDesign(
      n_individuals, horizon, block_len,
      std::vector<Partition>(time_block_count(horizon, block_len), partition));
}

Partition singleton_partition(int n) {
  Partition p(n);
  for (int i = 0; i < n; ++i) p[i] = {i};
  return p;
}

Partition single_block_partition(int n) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  return {all};
}

Partition region_partition(const TrajectorySet& traj, int t_anchor,
                           double cell_side) {
  if (!(cell_side > 0.0)) throw std::invalid_argument("cell_side must be > 0");
  if (t_anchor < 0 || t_anchor >= traj.horizon()) {
    throw std::out_of_range("anchor round out of range");
  }
  const long cells = static_cast<long>(std::ceil(1.0 / cell_side));
  auto cell_index = [&](double v) {
    return std::min(static_cast<long>(std::floor(v / cell_side)), cells - 1);
  };
  std::map<std::pair<long, long>, std::vector<int>> groups;
  for (int i = 0; i < traj.n_individuals(); ++i) {
    const Point& p = traj.at(i, t_anchor);
    groups[{cell_index(p.x), cell_index(p.y)}].push_back(i);
  }
  Partition out;
  for (auto& [cell, members] : groups) out.push_back(std::move(members));
  canonicalise(out);
  return out;
}

Partition component_partition(const GraphSequence& g, int first, int last) {
  DisjointSets sets(g.n_individuals());
  for (int t = first; t <= last; ++t) {
    for (const Edge& e : g.edges(t)) sets.unite(e.a, e.b);
  }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < g.n_individuals(); ++i) groups[sets.find(i)].push_back(i);
  Partition out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  canonicalise(out);
  return out;
}

VerticalDesign make_region_design(const TrajectorySet& traj, int block_len,
                                  double cell_side) {
  const int blocks = time_block_count(traj.horizon(), block_len);
  std::vector<Partition> parts;
  for (int k = 0; k < blocks; ++k) {
    parts.push_back(region_partition(traj, k * block_len, cell_side));
  }
  return VerticalDesign(traj.n_individuals(), traj.horizon(), block_len,
                        std::move(parts));
}

VerticalDesign make_component_design(const GraphSequence& g, int block_len) {
  const int blocks = time_block_count(g.horizon(), block_len);
  std::vector<Partition> parts;
  for (int k = 0; k < blocks; ++k) {
    const int last = std::min(g.horizon(), (k + 1) * block_len) - 1;
    parts.push_back(component_partition(g, k * block_len, last));
  }
  return VerticalDesign(g.n_individuals(), g.horizon(), block_len,
                        std::move(parts));
}

AssignmentMatrix::AssignmentMatrix(int n_individuals, int horizon,
                                   std::vector<std::uint8_t> cells,
                                   std::vector<std::uint8_t> cluster_arms)
    : n_(n_individuals),
      horizon_(horizon),
      w_(std::move(cells)),
      arms_(std::move(cluster_arms)) {
  if (w_.size() != static_cast<std::size_t>(n_) * horizon_) {
    throw std::invalid_argument("assignment size must be N * T");
  }
  for (auto v : w_) {
    if (v > 1) throw std::invalid_argument("assignment entries must be 0/1");
  }
}

AssignmentMatrix AssignmentMatrix::constant(int n_individuals, int horizon,
                                            int arm) {
  return AssignmentMatrix(
      n_individuals, horizon,
      std::vector<std::uint8_t>(static_cast<std::size_t>(n_individuals) *
                                    horizon,
                                static_cast<std::uint8_t>(arm != 0)),
      {});
}

AssignmentMatrix assignment_from_arms(const VerticalDesign& d,
                                      std::vector<std::uint8_t> arms) {
  if (static_cast<int>(arms.size()) != d.n_clusters()) {
    throw std::invalid_argument("one arm per cluster required");
  }
  const int n = d.n_individuals();
  const int horizon = d.horizon();
  std::vector<std::uint8_t> w(static_cast<std::size_t>(n) * horizon);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < horizon; ++t) {
      w[static_cast<std::size_t>(i) * horizon + t] = arms[d.cluster_of(i, t)];
    }
  }
  return AssignmentMatrix(n, horizon, std::move(w), std::move(arms));
}

std::vector<std::uint8_t> sample_cluster_arms(const VerticalDesign& d,
                                              Engine& rng) {
  std::vector<std::uint8_t> arms(d.n_clusters());
  std::uint64_t word = 0;
  for (int c = 0; c < d.n_clusters(); ++c) {
    if (c % 64 == 0) word = rng();
    arms[c] = static_cast<std::uint8_t>((word >> (c % 64)) & 1u);
  }
  return arms;
}

AssignmentMatrix sample_assignment(const VerticalDesign& d, std::uint64_t seed) {
  Engine rng = make_engine(seed, kStreamAssignment);
  return assignment_from_arms(d, sample_cluster_arms(d, rng));
}

std::vector<int> clusters_touching(const VerticalDesign& d,
                                   std::span<const SpaceTimePoint> pts) {
  std::vector<int> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    if (p.individual < 0 || p.individual >= d.n_individuals() || p.round < 0 ||
        p.round >= d.horizon()) {
      throw std::out_of_range("space-time point out of range");
    }
    out.push_back(d.cluster_of(p.individual, p.round));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace dynint
