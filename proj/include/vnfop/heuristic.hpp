#pragma once

// Multi-stage graph heuristic. Each traffic is modelled as a trellis with
// one stage per chain element plus ingress and egress stages; a Viterbi
// sweep picks the cheapest switch sequence, which is then realized on
// concrete slots and links and committed before the next traffic.

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "vnfop/cost.hpp"
#include "vnfop/feasibility.hpp"
#include "vnfop/paths.hpp"
#include "vnfop/state.hpp"

namespace vnfop {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Stage 0 holds the ingress switch and the last stage the egress switch.
// edge_cost[i][a][b] prices the move from node a of stage i to node b of
// stage i + 1; node_cost[i][b] is added when node b of stage i is entered.
struct MultiStageGraph {
  std::vector<std::vector<int>> switches;
  std::vector<std::vector<double>> node_cost;
  std::vector<std::vector<std::vector<double>>> edge_cost;

  int stage_count() const { return static_cast<int>(switches.size()); }
};

struct ViterbiTables {
  // Cheapest cost of any stage-0..i prefix ending at node j (inf if none).
  std::vector<std::vector<double>> cost;
  // Predecessor node index in stage i - 1, or -1.
  std::vector<std::vector<int>> back;
  // Basic operations performed: one per table cell initialised plus one per
  // (predecessor, node) relaxation.
  std::uint64_t operations = 0;
};

inline ViterbiTables RunViterbi(const MultiStageGraph& g) {
  ViterbiTables t;
  const int stages = g.stage_count();
  t.cost.resize(stages);
  t.back.resize(stages);
  for (int i = 0; i < stages; ++i) {
    t.cost[i].assign(g.switches[i].size(), kInfinity);
    t.back[i].assign(g.switches[i].size(), -1);
    t.operations += g.switches[i].size();
  }
  if (stages == 0) return t;
  for (std::size_t j = 0; j < g.switches[0].size(); ++j) {
    t.cost[0][j] = g.node_cost[0][j];
  }
  for (int i = 1; i < stages; ++i) {
    for (std::size_t j = 0; j < g.switches[i].size(); ++j) {
      double best = kInfinity;
      int arg = -1;
      // Scan predecessors in switch order; strict improvement keeps the
      // smallest predecessor among ties.
      for (std::size_t k = 0; k < g.switches[i - 1].size(); ++k) {
        ++t.operations;
        double c = t.cost[i - 1][k] + g.edge_cost[i - 1][k][j];
        if (c < best) {
          best = c;
          arg = static_cast<int>(k);
        }
      }
      if (arg >= 0) {
        t.cost[i][j] = best + g.node_cost[i][j];
        t.back[i][j] = arg;
      }
    }
  }
  return t;
}

// Node index chosen in every stage, following back-pointers from the
// cheapest final node. Empty when no finite path exists.
inline std::vector<int> TraceBack(const MultiStageGraph& g,
                                  const ViterbiTables& t) {
  const int stages = g.stage_count();
  if (stages == 0) return {};
  int best = -1;
  for (std::size_t j = 0; j < t.cost[stages - 1].size(); ++j) {
    if (t.cost[stages - 1][j] < kInfinity &&
        (best < 0 || t.cost[stages - 1][j] < t.cost[stages - 1][best])) {
      best = static_cast<int>(j);
    }
  }
  if (best < 0) return {};
  std::vector<int> nodes(stages);
  nodes[stages - 1] = best;
  for (int i = stages - 1; i > 0; --i) nodes[i - 1] = t.back[i][nodes[i]];
  return nodes;
}

struct HeuristicOptions {
  // Alternate minimum-delay paths tried when the first lacks bandwidth.
  int k_paths = 3;
};

// Multi-stage graph for one traffic plus what each node and edge stands for.
struct StageGraph {
  MultiStageGraph graph;
  std::vector<std::vector<int>> node_slot;                   // -1 at endpoints
  std::vector<std::vector<std::vector<SwitchPath>>> edge_path;  // per edge
  // First chain stage with no candidate switch, or -1.
  int empty_stage = -1;
};

// Stage nodes or transitions excluded from the graph after a failed
// realization.
struct StageBans {
  std::set<std::pair<int, int>> nodes;            // (stage, switch)
  std::set<std::tuple<int, int, int>> transitions;  // (stage, from, to)
};

struct TrafficResult {
  bool provisioned = false;
  std::string reason;
  TrafficPlacement placement;
  CostBreakdown cost;
  std::uint64_t operations = 0;
};

struct BatchResult {
  std::vector<TrafficResult> traffics;
  CostBreakdown cost;
  int provisioned = 0;
  int failed = 0;
  std::uint64_t operations = 0;
};

// Extra watts drawn when slot m is activated on top of `ledger`.
inline double IncrementalPowerWatts(const AugmentedNetwork& net,
                                    const ResourceLedger& ledger, int m,
                                    IdleEnergyMode mode) {
  if (ledger.slot_active(m)) return 0.0;
  if (mode == IdleEnergyMode::kPerSlot) return SlotPowerWatts(net, m);
  const PseudoVnf& s = net.slot(m);
  std::vector<double> used(net.kind_count());
  for (int k = 0; k < net.kind_count(); ++k) used[k] = ledger.server_used(s.server, k);
  double before = ledger.server_active(s.server)
                      ? ServerPowerWatts(net, s.server, used)
                      : 0.0;
  for (int k = 0; k < net.kind_count(); ++k) used[k] += net.Requirement(s.type, k);
  return ServerPowerWatts(net, s.server, used) - before;
}

class HeuristicSolver {
 public:
  HeuristicSolver(std::shared_ptr<const AugmentedNetwork> net, CostWeights weights,
                  HeuristicOptions options = {})
      : net_(std::move(net)),
        weights_(std::move(weights)),
        options_(options),
        paths_(std::make_shared<PathTable>(net_->topology())),
        cache_(std::make_shared<PathCache>()) {
    weights_.Validate();
  }

  const PathTable& path_table() const { return *paths_; }
  const CostWeights& weights() const { return weights_; }

  // Cheapest way to host `type` for `bandwidth` at a switch: reuse an active
  // slot with room, else open the cheapest new slot. Returns (slot, cost);
  // slot is -1 when nothing fits.
  std::pair<int, double> PickSlot(const ResourceLedger& ledger, int switch_index,
                                  int type, double bandwidth) const {
    const AugmentedNetwork& net = *net_;
    const double cap = net.catalog().at(type).capacity_mbps;
    auto slots = net.SlotsAt(switch_index, type);
    for (int m : slots) {
      if (ledger.slot_active(m) && FitsWithin(ledger.slot_load(m) + bandwidth, cap)) {
        return {m, 0.0};
      }
    }
    if (!FitsWithin(bandwidth, cap)) return {-1, kInfinity};
    int best = -1;
    double best_cost = kInfinity;
    int last_server = -1;
    for (int m : slots) {
      const PseudoVnf& s = net.slot(m);
      if (ledger.slot_active(m) || s.server == last_server) continue;
      // Inactive slots of one type on one server are interchangeable; only
      // the first is considered.
      last_server = s.server;
      if (!ledger.CanActivate(net, m)) continue;
      double cost = weights_.alpha * net.catalog().at(type).deploy_cost +
                    weights_.beta * weights_.dollars_per_watt *
                        IncrementalPowerWatts(net, ledger, m, weights_.idle_mode);
      if (cost < best_cost) {
        best_cost = cost;
        best = m;
      }
    }
    return {best, best_cost};
  }

  // Path u -> v with `bandwidth` residual on every link: the minimum-delay
  // path if it fits, else the next of the k shortest. Empty when none.
  SwitchPath PickPath(const ResourceLedger& ledger, int u, int v,
                      double bandwidth) const {
    if (u == v) return {u};
    const SwitchPath& first = paths_->DelayPath(u, v);
    if (first.empty()) return {};
    if (PathFits(ledger, first, bandwidth)) return first;
    for (const SwitchPath& p : AlternatePaths(u, v)) {
      if (PathFits(ledger, p, bandwidth)) return p;
    }
    return {};
  }

  StageGraph BuildStageCosts(const NetworkState& state, const TrafficRequest& t,
                             const StageBans& bans = {}) const {
    const AugmentedNetwork& net = *net_;
    const Topology& topo = net.topology();
    const ResourceLedger& ledger = state.ledger();
    const int chain = static_cast<int>(t.chain.size());
    const int stages = chain + 2;
    const double bw = t.bandwidth_mbps;
    const double stage_budget = t.delay_budget_ms / (chain + 1);

    StageGraph sg;
    MultiStageGraph& g = sg.graph;
    g.switches.resize(stages);
    g.node_cost.resize(stages);
    sg.node_slot.resize(stages);
    g.switches[0] = {topo.SwitchIndex(t.ingress)};
    g.node_cost[0] = {0.0};
    sg.node_slot[0] = {-1};
    for (int i = 1; i <= chain; ++i) {
      int type = net.catalog().Index(t.chain[i - 1]);
      for (int j = 0; j < topo.switch_count(); ++j) {
        if (bans.nodes.contains({i, j})) continue;
        auto [slot, cost] = PickSlot(ledger, j, type, bw);
        if (slot < 0) continue;
        g.switches[i].push_back(j);
        g.node_cost[i].push_back(cost);
        sg.node_slot[i].push_back(slot);
      }
      if (g.switches[i].empty() && sg.empty_stage < 0) sg.empty_stage = i;
    }
    g.switches[stages - 1] = {topo.SwitchIndex(t.egress)};
    g.node_cost[stages - 1] = {0.0};
    sg.node_slot[stages - 1] = {-1};

    g.edge_cost.resize(stages - 1);
    sg.edge_path.resize(stages - 1);
    for (int i = 0; i + 1 < stages; ++i) {
      const double proc =
          (i + 1 <= chain) ? net.catalog().at(t.chain[i]).proc_delay_ms : 0.0;
      const auto& from = g.switches[i];
      const auto& to = g.switches[i + 1];
      g.edge_cost[i].assign(from.size(), std::vector<double>(to.size(), kInfinity));
      sg.edge_path[i].assign(from.size(), std::vector<SwitchPath>(to.size()));
      for (std::size_t a = 0; a < from.size(); ++a) {
        for (std::size_t b = 0; b < to.size(); ++b) {
          if (bans.transitions.contains({i, from[a], to[b]})) continue;
          SwitchPath path = PickPath(ledger, from[a], to[b], bw);
          if (path.empty()) continue;
          double delay = SwitchPathDelay(topo, path) + proc;
          double forwarding = bw * weights_.sigma * HopCount(path);
          double penalty = t.penalty.rate_dollars_per_ms *
                           std::max(0.0, delay - stage_budget);
          g.edge_cost[i][a][b] =
              weights_.gamma * forwarding + weights_.lambda * penalty;
          sg.edge_path[i][a][b] = std::move(path);
        }
      }
    }
    return sg;
  }

  // Places and routes one traffic and commits it to `state`. On failure the
  // state is left untouched.
  TrafficResult ProvisionTraffic(NetworkState& state, const TrafficRequest& t) const {
    const AugmentedNetwork& net = *net_;
    TrafficResult result;
    result.placement.request = t;
    ValidateRequest(t, net.topology(), net.catalog());
    if (state.HasTraffic(t.id)) {
      result.reason = "traffic " + t.id + " is already provisioned (Eq.6)";
      return result;
    }
    const int chain = static_cast<int>(t.chain.size());
    StageBans bans;
    while (true) {
      StageGraph sg = BuildStageCosts(state, t, bans);
      if (sg.empty_stage >= 0) {
        const std::string& type = t.chain[sg.empty_stage - 1];
        bool exists = !net.SlotsOfType(net.catalog().Index(type)).empty();
        result.reason = exists ? "no server can host " + type + " for " +
                                     FormatDouble(t.bandwidth_mbps) +
                                     " Mbps (Eq.2/Eq.3)"
                               : "no server may run " + type + " (Eq.1)";
        return result;
      }
      ViterbiTables tables = RunViterbi(sg.graph);
      result.operations += tables.operations;
      std::vector<int> nodes = TraceBack(sg.graph, tables);
      if (nodes.empty()) {
        result.reason = "no path with " + FormatDouble(t.bandwidth_mbps) +
                        " Mbps of residual bandwidth (Eq.8)";
        return result;
      }

      // Realize on a scratch ledger so repeated use of a slot, server or
      // link within this traffic is accounted for.
      ResourceLedger scratch = state.ledger();
      TrafficPlacement placement;
      placement.request = t;
      bool conflict = false;
      for (int i = 1; i <= chain && !conflict; ++i) {
        int sw = sg.graph.switches[i][nodes[i]];
        int type = net.catalog().Index(t.chain[i - 1]);
        auto [slot, cost] = PickSlot(scratch, sw, type, t.bandwidth_mbps);
        if (slot < 0) {
          bans.nodes.insert({i, sw});
          conflict = true;
          break;
        }
        scratch.AddSlotLoad(net, slot, t.bandwidth_mbps);
        placement.slots.push_back(slot);
      }
      for (int i = 0; i + 1 < chain + 2 && !conflict; ++i) {
        int u = sg.graph.switches[i][nodes[i]];
        int v = sg.graph.switches[i + 1][nodes[i + 1]];
        SwitchPath path = sg.edge_path[i][nodes[i]][nodes[i + 1]];
        if (!PathFits(scratch, path, t.bandwidth_mbps)) {
          path = PickPath(scratch, u, v, t.bandwidth_mbps);
        }
        if (path.empty()) {
          bans.transitions.insert({i, u, v});
          conflict = true;
          break;
        }
        for (std::size_t h = 1; h < path.size(); ++h) {
          scratch.AddLinkLoad(*net.topology().FindLink(path[h - 1], path[h]),
                              t.bandwidth_mbps);
        }
        placement.routes.push_back(ToRoute(path));
      }
      if (conflict) continue;

      auto violations = CheckFeasibility(state, std::span(&placement, 1));
      if (!violations.empty()) {
        throw Error("heuristic produced an infeasible placement: " +
                    Describe(violations));
      }
      NetworkState before = state;
      state.Commit(placement);
      result.cost = EventCost(before, state, std::span(&placement, 1), weights_);
      result.placement = std::move(placement);
      result.provisioned = true;
      return result;
    }
  }

  // Provisions traffics one after another in the given order. A failed
  // traffic does not undo earlier ones.
  BatchResult ProvisionBatch(NetworkState& state,
                             std::span<const TrafficRequest> batch) const {
    BatchResult out;
    if (batch.empty()) return out;
    NetworkState before = state;
    Assignment added;
    for (const TrafficRequest& t : batch) {
      TrafficResult r = ProvisionTraffic(state, t);
      out.operations += r.operations;
      if (r.provisioned) {
        ++out.provisioned;
        added.push_back(r.placement);
      } else {
        ++out.failed;
      }
      out.traffics.push_back(std::move(r));
    }
    if (!added.empty()) out.cost = EventCost(before, state, added, weights_);
    return out;
  }

 private:
  using PathCache = std::pair<std::mutex, std::map<std::pair<int, int>,
                                                   std::vector<SwitchPath>>>;

  bool PathFits(const ResourceLedger& ledger, const SwitchPath& path,
                double bandwidth) const {
    if (path.empty()) return false;
    const Topology& topo = net_->topology();
    for (std::size_t h = 1; h < path.size(); ++h) {
      int link = *topo.FindLink(path[h - 1], path[h]);
      if (!FitsWithin(ledger.link_load(link) + bandwidth,
                      topo.links()[link].bandwidth_mbps)) {
        return false;
      }
    }
    return true;
  }

  std::vector<SwitchPath> AlternatePaths(int u, int v) const {
    std::lock_guard<std::mutex> lock(cache_->first);
    auto [it, inserted] = cache_->second.try_emplace({u, v});
    if (inserted) {
      it->second = KShortestPaths(net_->topology(), u, v, options_.k_paths);
    }
    return it->second;
  }

  std::shared_ptr<const AugmentedNetwork> net_;
  CostWeights weights_;
  HeuristicOptions options_;
  std::shared_ptr<PathTable> paths_;
  std::shared_ptr<PathCache> cache_;
};

}  // namespace vnfop
