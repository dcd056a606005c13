#ifndef DYNINT_TESTS_SUPPORT_HPP_
#define DYNINT_TESTS_SUPPORT_HPP_

// Test-only instance generators and independent reference computations.
// Nothing here calls the library routine it is used to check.

#include <cstdint>
#include <optional>
#include <vector>

#include "dynint/design.hpp"
#include "dynint/env.hpp"
#include "dynint/graphs.hpp"
#include "dynint/rng.hpp"

namespace dynint::testing {

struct Instance {
  GraphSequence g;
  Environment env;
  VerticalDesign d;
  int radius = 0;
  std::uint64_t seed = 0;
};

// Random partition of {0..n-1} into at most `blocks` non-empty blocks.
Partition random_partition(int n, int blocks, Engine& rng);

// Random vertical design with at most max_clusters clusters in total, or
// nullopt when block_len leaves too many time blocks.
std::optional<VerticalDesign> random_design(int n, int horizon, int block_len,
                                            int max_clusters, Engine& rng);

GraphSequence random_graphs(int n, int horizon, Engine& rng);

// N <= max_n, T <= max_t, |S| = 2, at most max_clusters clusters,
// r in [0, 6], t_mix in {0.5, 1, 2, 4}.
Instance small_instance(std::uint64_t seed, int max_n = 6, int max_t = 12,
                        int max_clusters = 12);

// Same graphs and environment with l = r = ceil(2 t_mix log NT) and a fresh
// random design for the new block count.
Instance auto_variant(const Instance& base, int max_clusters = 12);

// H_k edge straight from the definition: some block of Pi_k meets both
// block-k union neighbourhoods. Uses only has_edge and partition(k).
bool brute_cig_edge(const GraphSequence& g, const VerticalDesign& d, int k,
                    int i, int j);

// Number of clusters meeting N^r(it), from partition membership scans.
int brute_touched_count(const GraphSequence& g, const VerticalDesign& d, int i,
                        int t, int radius);

// Exact E and Var of the HT estimate by enumerating every cluster assignment
// and every joint state path (feasible only for a handful of cells).
struct BruteMoments {
  double mean = 0.0;
  double variance = 0.0;
};
BruteMoments brute_moments(const Environment& env, const GraphSequence& g,
                           const VerticalDesign& d, int radius);

// E[Y_it Y_jt' | w] for i != j from the product chain of the pair.
double product_chain_cross_moment(const Environment& env,
                                  const GraphSequence& g,
                                  const AssignmentMatrix& w, int i, int t,
                                  int j, int tp);

}  // namespace dynint::testing

#endif  // DYNINT_TESTS_SUPPORT_HPP_
