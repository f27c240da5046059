#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracle.hpp"
#include "support.hpp"
#include "vnfop/paths.hpp"

namespace vnfop {
namespace {

double Delay(const Topology& topo, const SwitchPath& p) { return SwitchPathDelay(topo, p); }

TEST(PathTable, WorkedExampleShortestDelays) {
  auto inst = testing::WorkedExample();
  const Topology& topo = inst.net->topology();
  PathTable table(topo);
  int s1 = topo.SwitchIndex("1"), s6 = topo.SwitchIndex("6");
  // 1-2-4-6 and 1-2-4-5-6 both cost 6 ms; fewer hops wins.
  EXPECT_EQ(table.MinDelay(s1, s6), 6.0);
  EXPECT_EQ(table.DelayPath(s1, s6),
            (SwitchPath{s1, topo.SwitchIndex("2"), topo.SwitchIndex("4"), s6}));
  EXPECT_EQ(table.Hops(s1, s6), 3);
  EXPECT_EQ(table.DelayPath(s1, s1), SwitchPath{s1});
  EXPECT_EQ(table.Hops(s1, s1), 0);
}

TEST(PathTable, UnreachableIsEmpty) {
  Topology topo({"a", "b", "c"}, {{"a", "b", 10, 1}}, {});
  PathTable table(topo);
  EXPECT_TRUE(table.DelayPath(0, 2).empty());
  EXPECT_EQ(table.Hops(0, 2), -1);
  EXPECT_TRUE(KShortestPaths(topo, 0, 2, 3).empty());
  EXPECT_TRUE(SimplePaths(topo, 0, 2, 5, 100)->empty());
}

TEST(PathTable, MatchesEnumerationOnRandomGraphs) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 40; ++round) {
    auto inst = testing::RandomInstance(rng);
    const Topology& topo = inst.net->topology();
    PathTable table(topo);
    for (int a = 0; a < topo.switch_count(); ++a) {
      for (int b = 0; b < topo.switch_count(); ++b) {
        auto all = testing::AllSimplePaths(topo, a, b);
        double best = 1e300;
        int fewest = 1 << 30;
        for (const auto& p : all) {
          best = std::min(best, Delay(topo, p));
          fewest = std::min(fewest, HopCount(p));
        }
        EXPECT_NEAR(table.MinDelay(a, b), best, 1e-9);
        EXPECT_NEAR(Delay(topo, table.DelayPath(a, b)), best, 1e-9);
        EXPECT_EQ(table.Hops(a, b), fewest);
      }
    }
  }
}

TEST(KShortestPaths, AreTheCheapestSimplePaths) {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 40; ++round) {
    auto inst = testing::RandomInstance(rng);
    const Topology& topo = inst.net->topology();
    const int n = topo.switch_count();
    int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
    int b = std::uniform_int_distribution<int>(0, n - 1)(rng);
    if (a == b) continue;
    auto all = testing::AllSimplePaths(topo, a, b);
    std::vector<double> delays;
    for (const auto& p : all) delays.push_back(Delay(topo, p));
    std::sort(delays.begin(), delays.end());
    auto k = KShortestPaths(topo, a, b, 4);
    ASSERT_EQ(k.size(), std::min<std::size_t>(4, all.size()));
    for (std::size_t i = 0; i < k.size(); ++i) {
      EXPECT_NEAR(Delay(topo, k[i]), delays[i], 1e-9);
      EXPECT_NE(std::find(all.begin(), all.end(), k[i]), all.end());
      for (std::size_t j = 0; j < i; ++j) EXPECT_NE(k[i], k[j]);
    }
  }
}

TEST(SimplePaths, EnumeratesEveryPathAndHonoursLimits) {
  std::mt19937_64 rng(13);
  for (int round = 0; round < 40; ++round) {
    auto inst = testing::RandomInstance(rng);
    const Topology& topo = inst.net->topology();
    int a = 0, b = topo.switch_count() - 1;
    auto all = testing::AllSimplePaths(topo, a, b);
    auto got = SimplePaths(topo, a, b, topo.switch_count(), 100000);
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(got->size(), all.size());
    for (std::size_t i = 1; i < got->size(); ++i) {
      EXPECT_LE(HopCount((*got)[i - 1]), HopCount((*got)[i]));
    }
    if (all.size() > 1) {
      EXPECT_FALSE(SimplePaths(topo, a, b, topo.switch_count(), all.size() - 1));
    }
    auto short_ones = SimplePaths(topo, a, b, 2, 100000);
    for (const auto& p : *short_ones) EXPECT_LE(HopCount(p), 2);
  }
}

}  // namespace
}  // namespace vnfop
