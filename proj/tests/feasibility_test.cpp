#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "support.hpp"
#include "vnfop/feasibility.hpp"
#include "vnfop/paths.hpp"

namespace vnfop {
namespace {

bool Names(const std::vector<Violation>& v, const std::string& tag) {
  for (const Violation& x : v) {
    if (x.constraint == tag) return true;
  }
  return false;
}

class WorkedExampleFeasibility : public ::testing::Test {
 protected:
  WorkedExampleFeasibility() : inst_(testing::WorkedExample()), state_(inst_.net) {}

  int Sw(const char* id) const { return inst_.net->topology().SwitchIndex(id); }
  int Slot(const char* id) const { return *inst_.net->FindSlot(id); }
  Route Path(std::initializer_list<const char*> ids) const {
    std::vector<int> sw;
    for (const char* id : ids) sw.push_back(Sw(id));
    Route r;
    for (std::size_t i = 1; i < sw.size(); ++i) r.push_back({sw[i - 1], sw[i]});
    return r;
  }

  // firewall at switch 2, IDS at 3, proxy at 4; 1-2-3-4-6.
  TrafficPlacement Valid() const {
    TrafficPlacement p;
    p.request = inst_.traffic.at(0);
    p.slots = {Slot("n2/firewall/0"), Slot("n3/ids/0"), Slot("n4/proxy/0")};
    p.routes = {Path({"1", "2"}), Path({"2", "3"}), Path({"3", "4"}), Path({"4", "6"})};
    return p;
  }

  testing::Instance inst_;
  NetworkState state_;
};

TEST_F(WorkedExampleFeasibility, ValidSolutionPasses) {
  TrafficPlacement p = Valid();
  EXPECT_TRUE(CheckFeasibility(state_, std::span(&p, 1)).empty());
}

TEST_F(WorkedExampleFeasibility, OverloadedSlotIsFlagged) {
  TrafficPlacement a = Valid(), b = Valid();
  a.request.bandwidth_mbps = b.request.bandwidth_mbps = 600;
  b.request.id = "t2";
  b.slots[1] = Slot("n4/ids/0");
  b.routes = {Path({"1", "2"}), Path({"2", "4"}), Path({"4"}), Path({"4", "6"})};
  Assignment both{a, b};
  auto v = CheckFeasibility(state_, both);
  ASSERT_TRUE(Names(v, "Eq.2")) << Describe(v);
  EXPECT_NE(Describe(v).find("1200 Mbps > 900"), std::string::npos) << Describe(v);
}

TEST_F(WorkedExampleFeasibility, MissingHopBreaksRouting) {
  TrafficPlacement p = Valid();
  p.routes[3] = {};  // proxy at 4 never reaches egress 6
  auto v = CheckFeasibility(state_, std::span(&p, 1));
  EXPECT_TRUE(Names(v, "Eq.9")) << Describe(v);
  p = Valid();
  p.routes[0] = Path({"1", "3"});
  p.routes[0].push_back({Sw("4"), Sw("2")});  // jumps from 3 to 4
  v = CheckFeasibility(state_, std::span(&p, 1));
  EXPECT_TRUE(Names(v, "Eq.9")) << Describe(v);
}

TEST_F(WorkedExampleFeasibility, NonexistentLinkBreaksRouting) {
  TrafficPlacement p = Valid();
  p.routes[3] = Path({"4", "6"});
  p.routes[2] = {{Sw("3"), Sw("6")}, {Sw("6"), Sw("4")}};
  auto v = CheckFeasibility(state_, std::span(&p, 1));
  EXPECT_TRUE(Names(v, "Eq.9")) << Describe(v);
}

TEST_F(WorkedExampleFeasibility, BothDirectionsIsFlagged) {
  TrafficPlacement p = Valid();
  p.routes[1] = Path({"2", "3", "2", "3"});
  auto v = CheckFeasibility(state_, std::span(&p, 1));
  EXPECT_TRUE(Names(v, "Eq.7")) << Describe(v);
}

TEST_F(WorkedExampleFeasibility, WrongTypeAndMissingNodeAreFlagged) {
  TrafficPlacement p = Valid();
  p.slots[0] = Slot("n2/proxy/0");
  EXPECT_TRUE(Names(CheckFeasibility(state_, std::span(&p, 1)), "Eq.4"));
  p = Valid();
  p.slots.pop_back();
  EXPECT_TRUE(Names(CheckFeasibility(state_, std::span(&p, 1)), "Eq.5"));
  p = Valid();
  p.slots[2] = -1;
  EXPECT_TRUE(Names(CheckFeasibility(state_, std::span(&p, 1)), "Eq.5"));
}

TEST_F(WorkedExampleFeasibility, RepeatedOrCommittedTrafficIsFlagged) {
  TrafficPlacement p = Valid();
  Assignment twice{p, p};
  EXPECT_TRUE(Names(CheckFeasibility(state_, twice), "Eq.6"));
  state_.Commit(p);
  EXPECT_TRUE(Names(CheckFeasibility(state_, std::span(&p, 1)), "Eq.6"));
}

TEST_F(WorkedExampleFeasibility, OverpackedServerIsFlagged) {
  // Four 4-core firewalls plus an 8-core IDS on a 16-core server.
  Assignment a;
  for (int i = 0; i < 5; ++i) {
    TrafficPlacement p;
    p.request = testing::Request("x" + std::to_string(i), "3", "3",
                                 {i < 4 ? "firewall" : "ids"}, 10);
    std::string id = i < 4 ? "n3/firewall/" + std::to_string(i) : "n3/ids/0";
    p.slots = {Slot(id.c_str())};
    p.routes = {{}, {}};
    a.push_back(p);
  }
  auto v = CheckFeasibility(state_, a);
  EXPECT_TRUE(Names(v, "Eq.3")) << Describe(v);
}

TEST_F(WorkedExampleFeasibility, SaturatedLinkIsFlagged) {
  TrafficPlacement p = Valid();
  p.request.bandwidth_mbps = 500;
  Assignment many;
  for (int i = 0; i < 21; ++i) {
    TrafficPlacement q;
    q.request = testing::Request("r" + std::to_string(i), "1", "2", {}, 500);
    q.routes = {Path({"1", "2"})};
    many.push_back(q);
  }
  auto v = CheckFeasibility(state_, many);
  EXPECT_TRUE(Names(v, "Eq.8")) << Describe(v);
  many.pop_back();
  EXPECT_TRUE(CheckFeasibility(state_, many).empty());
}

TEST_F(WorkedExampleFeasibility, RestrictedTypeHasNoSlotOnOtherHosts) {
  EXPECT_TRUE(inst_.net->FindSlot("n3/ids/0").has_value());
  EXPECT_TRUE(inst_.net->FindSlot("n4/ids/0").has_value());
  EXPECT_FALSE(inst_.net->FindSlot("n2/ids/0").has_value());
}

// Random placements: the checker agrees with the oracle's capacity test, and
// flow-valid routes never raise Eq.4/5/7/9.
TEST(FeasibilityProperty, AgreesWithOracleCapacityCheck) {
  std::mt19937_64 rng(77);
  int infeasible = 0, feasible = 0;
  for (int round = 0; round < 300; ++round) {
    testing::RandomShape shape;
    shape.max_traffic = 6;
    auto inst = testing::RandomInstance(rng, shape);
    const AugmentedNetwork& net = *inst.net;
    Assignment a;
    for (TrafficRequest t : inst.traffic) {
      t.bandwidth_mbps *= 3;
      TrafficPlacement p;
      p.request = t;
      for (const std::string& type : t.chain) {
        auto slots = net.SlotsOfType(net.catalog().Index(type));
        p.slots.push_back(slots[std::uniform_int_distribution<std::size_t>(0, slots.size() - 1)(rng)]);
      }
      std::vector<int> z = p.NodeSwitches(net);
      for (std::size_t e = 0; e + 1 < z.size(); ++e) {
        auto paths = testing::AllSimplePaths(net.topology(), z[e], z[e + 1]);
        const auto& path = paths[std::uniform_int_distribution<std::size_t>(0, paths.size() - 1)(rng)];
        p.routes.push_back(ToRoute(path));
      }
      a.push_back(p);
    }
    NetworkState state(inst.net);
    auto v = CheckFeasibility(state, a);
    for (const Violation& x : v) {
      EXPECT_TRUE(x.constraint == "Eq.2" || x.constraint == "Eq.3" || x.constraint == "Eq.8")
          << Describe(v);
    }
    EXPECT_EQ(v.empty(), testing::OracleFeasible(net, a));
    (v.empty() ? feasible : infeasible)++;
  }
  EXPECT_GT(feasible, 20);
  EXPECT_GT(infeasible, 20);
}

}  // namespace
}  // namespace vnfop
