#include <cmath>

#include <gtest/gtest.h>

#include "dynint/estimator.hpp"
#include "dynint/oracle.hpp"
#include "support.hpp"

namespace dynint {
namespace {

// mu = own arm, states irrelevant.
Environment own_arm_env(double sigma = 0.0) {
  EnvironmentSpec spec;
  spec.t_mix = 1.0;
  spec.sigma = sigma;
  spec.base_kernels = {Kernel::Identity(2, 2), Kernel::Identity(2, 2)};
  const Distribution u = Distribution::Constant(2, 0.5);
  spec.anchors = {u, u};
  spec.outcome.values = {StateValues::Zero(2), StateValues::Ones(2)};
  spec.outcome.own_weight = 1.0;
  spec.initial = u;
  return build_env(spec);
}

TEST(ExactMoments, OwnArmSingleCluster) {
  const auto g = make_dynamic_er(3, 4, {0.3, 0.3, 0.3}, 2);
  const auto d = make_uniform_design(3, 4, 4, single_block_partition(3));
  const auto rep = exact_moments(own_arm_env(), g, d, 10);
  EXPECT_NEAR(rep.mean_estimate, 1.0, 1e-12);
  EXPECT_NEAR(rep.true_ate, 1.0, 1e-12);
  EXPECT_NEAR(rep.bias, 0.0, 1e-12);
  // The estimate is 2 or 0 with equal odds.
  EXPECT_NEAR(rep.variance, 1.0, 1e-12);
  EXPECT_EQ(rep.assignments, 2);
}

TEST(ExactMoments, ArmFreeEnvironment) {
  Engine rng = make_engine(3);
  EnvironmentSpec spec = random_environment_spec(2, 1.0, 0.2, rng);
  spec.base_kernels[1] = spec.base_kernels[0];
  spec.anchors[1] = spec.anchors[0];
  spec.outcome.values[1] = spec.outcome.values[0];
  const auto g = make_dynamic_er(3, 5, {0.4, 0.3, 0.3}, 3);
  const auto d = make_uniform_design(3, 5, 2, singleton_partition(3));
  const auto rep = exact_moments(build_env(spec), g, d, 1);
  EXPECT_NEAR(rep.true_ate, 0.0, 1e-14);
  EXPECT_NEAR(rep.mean_estimate, 0.0, 1e-12);
}

TEST(ExactMoments, MatchesPathEnumeration) {
  int checked = 0;
  for (std::uint64_t s = 0; checked < 25; ++s) {
    const auto inst = testing::small_instance(s, 3, 5, 10);
    if (inst.g.n_individuals() * inst.g.horizon() > 16) continue;
    const auto brute =
        testing::brute_moments(inst.env, inst.g, inst.d, inst.radius);
    const auto rep = exact_moments(inst.env, inst.g, inst.d, inst.radius);
    EXPECT_NEAR(rep.mean_estimate, brute.mean, 1e-10) << "seed " << s;
    EXPECT_NEAR(rep.variance, brute.variance, 1e-9) << "seed " << s;
    ++checked;
  }
}

TEST(ExactMoments, LotcMatchesDirect) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto inst = testing::small_instance(s);
    const auto rep = exact_moments(inst.env, inst.g, inst.d, inst.radius);
    EXPECT_NEAR(rep.variance, rep.variance_lotc, 1e-9) << "seed " << s;
    EXPECT_NEAR(rep.variance_lotc, rep.expected_conditional_variance +
                                       rep.variance_of_conditional_mean,
                1e-12);
    EXPECT_GE(rep.variance, -1e-9);
  }
}

TEST(ExactMoments, PairTableSumsToVariance) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = testing::small_instance(s);
    const auto rep = exact_moments(inst.env, inst.g, inst.d, inst.radius,
                                   {.budget = 20, .pair_cov = true});
    ASSERT_TRUE(rep.has_pair_cov());
    double total = 0.0;
    for (double v : rep.pair_cov) total += v;
    const double cells = inst.g.n_individuals() * inst.g.horizon();
    EXPECT_NEAR(total / (cells * cells), rep.variance, 1e-9);
    for (int a = 0; a < cells; ++a) {
      for (int b = 0; b < cells; ++b) {
        EXPECT_NEAR(rep.pair_cov[a * cells + b], rep.pair_cov[b * cells + a],
                    1e-9);
      }
    }
  }
}

TEST(ExactMoments, CrossIndividualMatchesProductChain) {
  // For i != j the covariance is Cov_W of conditional means; check the
  // conditional cross moment the oracle relies on against a joint chain.
  const auto inst = testing::small_instance(8, 4, 6, 12);
  const auto w = sample_assignment(inst.d, 1);
  const auto prop = propagate_exact(inst.env, inst.g, w);
  const int n = inst.g.n_individuals();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int t = 0; t < inst.g.horizon(); ++t) {
        for (int u = 0; u < inst.g.horizon(); ++u) {
          EXPECT_NEAR(testing::product_chain_cross_moment(inst.env, inst.g, w,
                                                          i, t, j, u),
                      prop.mean_at(i, t) * prop.mean_at(j, u), 1e-12);
        }
      }
    }
  }
}

TEST(ExactMoments, BudgetRefusal) {
  const auto g = make_static(1, 25, {});
  const auto d = make_uniform_design(1, 25, 1, singleton_partition(1));
  try {
    exact_moments(own_arm_env(), g, d, 0);
    FAIL();
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.clusters(), 25);
    EXPECT_EQ(e.budget(), 20);
  }
}

TEST(ExactMoments, IndependentGroupsShareNoBudget) {
  // 30 clusters overall, but each individual only ever touches its own 6.
  const auto g = make_static(5, 6, {});
  const auto d = make_uniform_design(5, 6, 1, singleton_partition(5));
  const auto rep = exact_moments(own_arm_env(), g, d, 1);
  EXPECT_EQ(rep.n_groups, 5);
  EXPECT_EQ(rep.max_group_clusters, 6);
}

TEST(McMoments, MeanWithinThreeSe) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = testing::small_instance(s, 4, 8, 10);
    const auto exact = exact_moments(inst.env, inst.g, inst.d, inst.radius);
    const auto mc = mc_moments(inst.env, inst.g, inst.d, inst.radius,
                               {.replications = 20000, .seed = s});
    EXPECT_NEAR(mc.mean_estimate, exact.mean_estimate, 3.0 * mc.se_mean + 1e-12)
        << "seed " << s;
    EXPECT_NEAR(mc.variance, exact.variance, 3.0 * mc.se_variance + 1e-12)
        << "seed " << s;
  }
}

TEST(McMoments, StandardErrorScaling) {
  const auto inst = testing::small_instance(4, 4, 8, 10);
  double ratio = 0.0;
  const int trials = 30;
  for (int k = 0; k < trials; ++k) {
    const auto a = mc_moments(inst.env, inst.g, inst.d, inst.radius,
                              {.replications = 2000, .seed = 100u + k});
    const auto b = mc_moments(inst.env, inst.g, inst.d, inst.radius,
                              {.replications = 4000, .seed = 500u + k});
    ratio += (a.se_mean * a.se_mean) / (b.se_mean * b.se_mean);
  }
  EXPECT_NEAR(ratio / trials, 2.0, 0.3);
}

TEST(McMoments, JobsDoNotChangeResults) {
  const auto inst = testing::small_instance(6);
  const auto one = mc_moments(inst.env, inst.g, inst.d, inst.radius,
                              {.replications = 3001, .seed = 9, .jobs = 1});
  const auto three = mc_moments(inst.env, inst.g, inst.d, inst.radius,
                                {.replications = 3001, .seed = 9, .jobs = 3});
  EXPECT_EQ(one.mean_estimate, three.mean_estimate);
  EXPECT_EQ(one.variance, three.variance);
}

TEST(McMoments, RaoBlackwell) {
  const auto inst = testing::small_instance(2, 4, 8, 10);
  const auto exact = exact_moments(inst.env, inst.g, inst.d, inst.radius);
  const auto rb = mc_moments(inst.env, inst.g, inst.d, inst.radius,
                             {.replications = 20000, .seed = 3,
                              .rao_blackwell = true});
  EXPECT_TRUE(rb.rao_blackwell);
  EXPECT_NEAR(rb.mean_estimate, exact.mean_estimate, 3.0 * rb.se_mean + 1e-12);
  EXPECT_NEAR(rb.variance, exact.variance_of_conditional_mean,
              3.0 * rb.se_variance + 1e-12);
}

TEST(McMoments, NoRandomnessNoVariance) {
  const auto g = make_static(2, 3, {});
  const auto d = make_uniform_design(2, 3, 3, single_block_partition(2));
  // Arm-free constant outcome: every estimate is exactly zero.
  EnvironmentSpec spec;
  spec.t_mix = 1.0;
  spec.base_kernels = {Kernel::Identity(1, 1), Kernel::Identity(1, 1)};
  spec.anchors = {Distribution::Ones(1), Distribution::Ones(1)};
  spec.outcome.values = {StateValues::Zero(1), StateValues::Zero(1)};
  spec.initial = Distribution::Ones(1);
  const auto mc = mc_moments(build_env(spec), g, d, 1,
                             {.replications = 100, .seed = 1});
  EXPECT_EQ(mc.mean_estimate, 0.0);
  EXPECT_EQ(mc.variance, 0.0);
}

TEST(VerifyBounds, NoInterferenceAllPass) {
  const auto g = make_static(6, 12, {});
  const auto d = make_uniform_design(6, 12, 3, singleton_partition(6));
  const auto ledger = verify_bounds(own_arm_env(0.5), g, d, 3);
  for (const auto& row : ledger.rows) {
    EXPECT_EQ(row.verdict, Verdict::kPass) << row.name << " " << row.detail;
  }
  EXPECT_TRUE(ledger.all_pass());
  ASSERT_NE(ledger.find("covariance_lit"), nullptr);
  EXPECT_GT(ledger.find("covariance_lit")->checked, 0);
  EXPECT_EQ(ledger.find("nonexistent"), nullptr);
}

TEST(VerifyBounds, SlowMixingBiasPassesTrivially) {
  const auto inst = testing::small_instance(5);
  EnvironmentSpec spec = inst.env.spec();
  spec.t_mix = 1e6;
  const auto ledger = verify_bounds(build_env(spec), inst.g, inst.d, 0);
  EXPECT_EQ(ledger.find("bias")->verdict, Verdict::kPass);
}

TEST(VerifyBounds, MonteCarloCovarianceUnresolved) {
  const auto inst = testing::small_instance(5);
  VerifyOptions opt;
  opt.mode = OracleMode::kMonteCarlo;
  opt.mc.replications = 500;
  const auto ledger = verify_bounds(inst.env, inst.g, inst.d, inst.radius, opt);
  EXPECT_EQ(ledger.find("covariance_lit")->verdict, Verdict::kUnresolved);
  EXPECT_FALSE(ledger.all_pass());
}

TEST(TvDecay, IdenticalOnNeighbourhood) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto inst = testing::small_instance(s, 5, 10, 40);
    const int n = inst.g.n_individuals();
    const int horizon = inst.g.horizon();
    Engine rng = make_engine(s, 8);
    const auto w = sample_assignment(inst.d, s);
    const auto pw = propagate_exact(inst.env, inst.g, w);
    const double lam = inst.env.contraction();
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < horizon; ++t) {
        for (int r = 0; r <= t; ++r) {
          // Random w' agreeing with w on N^r(it).
          std::vector<std::uint8_t> cells(w.cells().begin(), w.cells().end());
          std::vector<std::uint8_t> keep(cells.size(), 0);
          for (const auto& p : spatio_temporal_neighborhood(inst.g, i, t, r)) {
            keep[p.individual * horizon + p.round] = 1;
          }
          for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!keep[c]) cells[c] = rng() & 1;
          }
          const AssignmentMatrix w2(n, horizon, cells, {});
          const auto pw2 = propagate_exact(inst.env, inst.g, w2);
          EXPECT_LE(total_variation(pw.state(i, t), pw2.state(i, t)),
                    std::pow(lam, r) + 1e-12);
        }
      }
    }
  }
}

}  // namespace
}  // namespace dynint
