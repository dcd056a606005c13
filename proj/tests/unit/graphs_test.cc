#include <cmath>

#include <gtest/gtest.h>

#include "dynint/graphs.hpp"

namespace dynint {
namespace {

TEST(Static, SameEdgesEveryRound) {
  const Edge e12[] = {{0, 1}};
  const auto g = make_static(3, 2, e12);
  for (int t = 0; t < 2; ++t) {
    ASSERT_EQ(g.edges(t).size(), 1u);
    EXPECT_EQ(g.edges(t)[0], (Edge{0, 1}));
  }
}

TEST(Static, SingleNodeOnlySelf) {
  const auto g = make_static(1, 5, {});
  for (int t = 0; t < 5; ++t) {
    EXPECT_EQ(neighborhood(g, 0, t), std::vector<int>{0});
  }
}

TEST(Static, TwoEdgesThreeRounds) {
  const Edge edges[] = {{0, 1}, {2, 3}};
  const auto g = make_static(4, 3, edges);
  EXPECT_EQ(g.total_edges(), 6u);
  for (int t = 0; t < 3; ++t) {
    EXPECT_TRUE(g.has_edge(1, 0, t));
    EXPECT_TRUE(g.has_edge(2, 3, t));
    EXPECT_FALSE(g.has_edge(0, 2, t));
  }
}

TEST(Static, RejectsBadPairs) {
  const Edge self[] = {{1, 1}};
  const Edge far[] = {{0, 3}};
  EXPECT_THROW(make_static(3, 2, self), std::invalid_argument);
  EXPECT_THROW(make_static(3, 2, far), std::invalid_argument);
}

TEST(Static, ReversedAndDuplicatePairsNormalised) {
  const auto g = GraphSequence(3, 1, {{{2, 0}, {0, 2}}});
  ASSERT_EQ(g.edges(0).size(), 1u);
  EXPECT_EQ(g.edges(0)[0], (Edge{0, 2}));
}

TEST(DynamicEr, NoBirthsIsEdgeless) {
  const auto g = make_dynamic_er(6, 5, {0.0, 0.0, 1.0}, 3);
  EXPECT_EQ(g.total_edges(), 0u);
}

TEST(DynamicEr, NoDeathsIsComplete) {
  const auto g = make_dynamic_er(5, 4, {1.0, 1.0, 0.0}, 3);
  for (int t = 0; t < 4; ++t) EXPECT_EQ(g.edges(t).size(), 10u);
}

TEST(DynamicEr, DeterministicPerSeed) {
  const ErParams p{0.3, 0.2, 0.4};
  EXPECT_EQ(make_dynamic_er(7, 9, p, 11), make_dynamic_er(7, 9, p, 11));
  EXPECT_FALSE(make_dynamic_er(7, 9, p, 11) == make_dynamic_er(7, 9, p, 12));
}

TEST(DynamicEr, SymmetricNeighbourLists) {
  const auto g = make_dynamic_er(8, 6, {0.4, 0.3, 0.3}, 5);
  for (int t = 0; t < 6; ++t) {
    for (int i = 0; i < 8; ++i) {
      for (int j : g.neighbors(i, t)) EXPECT_TRUE(g.has_edge(j, i, t));
    }
  }
}

TEST(DynamicEr, StationaryFrequency) {
  const auto g = make_dynamic_er(2, 10000, {0.5, 0.3, 0.3}, 17);
  const double freq = static_cast<double>(g.total_edges()) / 10000.0;
  EXPECT_NEAR(freq, 0.5, 0.02);
}

TEST(DynamicEr, MarginalIsHalfEveryRound) {
  const int runs = 10000;
  const int horizon = 6;
  std::vector<int> present(horizon, 0);
  for (int s = 0; s < runs; ++s) {
    const auto g = make_dynamic_er(2, horizon, {0.5, 0.2, 0.2}, 1000 + s);
    for (int t = 0; t < horizon; ++t) present[t] += g.has_edge(0, 1, t);
  }
  for (int t = 0; t < horizon; ++t) {
    EXPECT_NEAR(present[t] / static_cast<double>(runs), 0.5, 0.02) << t;
  }
}

TrajectorySet fixed_pair(Point a, std::vector<Point> b) {
  std::vector<Point> pos;
  for (const Point& p : b) {
    pos.push_back(a);
    pos.push_back(p);
  }
  return TrajectorySet(2, static_cast<int>(b.size()), pos, 0.2);
}

TEST(Metric, WithinKappaEveryRound) {
  const auto traj = fixed_pair({0.1, 0.1}, {{0.4, 0.1}, {0.4, 0.1}});
  const auto g = make_metric(traj, 0.5);
  EXPECT_TRUE(g.has_edge(0, 1, 0));
  EXPECT_TRUE(g.has_edge(0, 1, 1));
  EXPECT_EQ(make_metric(traj, 0.1).total_edges(), 0u);
}

TEST(Metric, MovingPoint) {
  const auto traj =
      fixed_pair({0.0, 0.0}, {{0.05, 0.0}, {0.15, 0.0}, {0.25, 0.0}});
  const auto g = make_metric(traj, 0.2);
  EXPECT_TRUE(g.has_edge(0, 1, 0));
  EXPECT_TRUE(g.has_edge(0, 1, 1));
  EXPECT_FALSE(g.has_edge(0, 1, 2));
}

TEST(Metric, ClosedBall) {
  const auto traj = fixed_pair({0.0, 0.0}, {{0.5, 0.0}});
  EXPECT_TRUE(make_metric(traj, 0.5).has_edge(0, 1, 0));
}

TEST(Metric, MatchesDistanceTest) {
  const auto traj = random_walk_trajectories(12, 20, 0.1, 9);
  const auto g = make_metric(traj, 0.25);
  for (int t = 0; t < 20; ++t) {
    for (int i = 0; i < 12; ++i) {
      for (int j = i + 1; j < 12; ++j) {
        const double d = std::hypot(traj.at(i, t).x - traj.at(j, t).x,
                                    traj.at(i, t).y - traj.at(j, t).y);
        if (std::abs(d - 0.25) > 1e-12) {
          EXPECT_EQ(g.has_edge(i, j, t), d <= 0.25);
        }
      }
    }
  }
}

TEST(RandomWalk, ZeroSpeedIsStationary) {
  const auto traj = random_walk_trajectories(4, 10, 0.0, 2);
  for (int t = 1; t < 10; ++t) {
    for (int i = 0; i < 4; ++i) EXPECT_EQ(traj.at(i, t), traj.at(i, 0));
  }
}

TEST(RandomWalk, StaysInBox) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto traj = random_walk_trajectories(1, 200, 0.3, seed);
    for (int t = 0; t < 200; ++t) {
      const Point& p = traj.at(0, t);
      EXPECT_TRUE(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0);
    }
  }
}

TEST(RandomWalk, StepsBoundedBySpeed) {
  const auto traj = random_walk_trajectories(2, 100, 0.1, 4);
  for (int t = 1; t < 100; ++t) {
    for (int i = 0; i < 2; ++i) {
      const double d = std::hypot(traj.at(i, t).x - traj.at(i, t - 1).x,
                                  traj.at(i, t).y - traj.at(i, t - 1).y);
      EXPECT_LE(d, 0.1 + 1e-12);
    }
  }
}

TEST(RandomWalk, DeterministicPerSeed) {
  const auto a = random_walk_trajectories(3, 30, 0.1, 8);
  const auto b = random_walk_trajectories(3, 30, 0.1, 8);
  for (int t = 0; t < 30; ++t) {
    for (int i = 0; i < 3; ++i) EXPECT_EQ(a.at(i, t), b.at(i, t));
  }
}

TEST(Trajectory, RejectsFastStep) {
  std::vector<Point> pos = {{0.0, 0.0}, {0.5, 0.0}};
  EXPECT_THROW(TrajectorySet(1, 2, pos, 0.1), std::invalid_argument);
}

TEST(Neighborhood, Examples) {
  EXPECT_EQ(neighborhood(make_static(3, 1, {}), 1, 0), std::vector<int>{1});
  std::vector<Edge> all;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) all.push_back({a, b});
  }
  const auto complete = make_static(4, 1, all);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(neighborhood(complete, i, 0), (std::vector<int>{0, 1, 2, 3}));
  }
  const Edge e12[] = {{0, 1}};
  EXPECT_EQ(neighborhood(make_static(3, 1, e12), 0, 0),
            (std::vector<int>{0, 1}));
}

TEST(Neighborhood, OutOfRange) {
  const auto g = make_static(3, 2, {});
  EXPECT_THROW(neighborhood(g, 3, 0), std::out_of_range);
  EXPECT_THROW(neighborhood(g, 0, 2), std::out_of_range);
}

TEST(SpatioTemporal, RadiusZero) {
  const Edge e12[] = {{0, 1}};
  const auto g = make_static(3, 4, e12);
  const auto pts = spatio_temporal_neighborhood(g, 0, 2, 0);
  EXPECT_EQ(pts, (std::vector<SpaceTimePoint>{{0, 2}, {1, 2}}));
}

TEST(SpatioTemporal, EdgelessRadiusThree) {
  const auto g = make_static(2, 6, {});
  // 1-based round 5 with r = 3 covers rounds 2..5.
  const auto pts = spatio_temporal_neighborhood(g, 1, 4, 3);
  EXPECT_EQ(pts, (std::vector<SpaceTimePoint>{{1, 1}, {1, 2}, {1, 3}, {1, 4}}));
}

TEST(SpatioTemporal, ClampsAtFirstRound) {
  const auto g = make_static(1, 6, {});
  const auto pts = spatio_temporal_neighborhood(g, 0, 1, 5);
  EXPECT_EQ(pts, (std::vector<SpaceTimePoint>{{0, 0}, {0, 1}}));
}

}  // namespace
}  // namespace dynint
