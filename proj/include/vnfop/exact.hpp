#pragma once

// Exhaustive branch-and-bound over slot assignments and simple-path routes.
// Chain nodes are fixed first (batch order, then chain order), then every
// traffic edge picks one capacity-feasible simple path. A node is pruned when
// its admissible bound exceeds the incumbent.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vnfop/cost.hpp"
#include "vnfop/feasibility.hpp"
#include "vnfop/format.hpp"
#include "vnfop/paths.hpp"
#include "vnfop/state.hpp"

namespace vnfop {

struct ExactLimits {
  int hop_bound = 0;  // 0 means the switch count
  std::uint64_t max_nodes = 5'000'000;
  std::size_t max_routes = 5000;  // simple paths per switch pair
  double time_budget_s = 60.0;
};

enum class SolveStatus { kOptimal, kInfeasible, kLimitExceeded };

inline const char* ToString(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kLimitExceeded:
      return "limit_exceeded";
  }
  return "unknown";
}

struct ExactResult {
  SolveStatus status = SolveStatus::kInfeasible;
  NetworkState state;  // updated on success, the input state otherwise
  Assignment assignment;
  CostBreakdown cost;
  std::string message;
  std::uint64_t nodes_explored = 0;
};

// Partially fixed decisions for a batch, indexed like the batch: slots per
// chain node and routes per traffic edge.
struct PartialPlacement {
  std::vector<std::vector<std::optional<int>>> slots;
  std::vector<std::vector<std::optional<Route>>> routes;

  static PartialPlacement Empty(std::span<const TrafficRequest> batch) {
    PartialPlacement p;
    for (const TrafficRequest& t : batch) {
      p.slots.emplace_back(t.chain.size());
      p.routes.emplace_back(t.chain.size() + 1);
    }
    return p;
  }
};

namespace detail {

class ExactSearch {
 public:
  ExactSearch(const NetworkState& base, std::span<const TrafficRequest> batch,
              const CostWeights& weights, const ExactLimits& limits)
      : base_(base),
        net_(base.network()),
        topo_(net_.topology()),
        batch_(batch.begin(), batch.end()),
        weights_(weights),
        limits_(limits),
        paths_(topo_),
        ledger_(base.ledger()) {
    hop_bound_ = limits.hop_bound > 0 ? limits.hop_bound : topo_.switch_count();
    for (std::size_t t = 0; t < batch_.size(); ++t) {
      const TrafficRequest& req = batch_[t];
      first_node_.push_back(static_cast<int>(node_type_.size()));
      first_edge_.push_back(static_cast<int>(edge_traffic_.size()));
      for (const std::string& type : req.chain) {
        node_type_.push_back(net_.catalog().Index(type));
        node_bw_.push_back(req.bandwidth_mbps);
      }
      for (std::size_t e = 0; e <= req.chain.size(); ++e) {
        edge_traffic_.push_back(static_cast<int>(t));
        edge_index_.push_back(static_cast<int>(e));
      }
    }
    slot_of_.assign(node_type_.size(), -1);
    route_of_.assign(edge_traffic_.size(), std::nullopt);
    PrecomputeTypeDistances();
  }

  // Fixes decisions from a partial placement; false if it does not fit the
  // batch shape.
  bool Apply(const PartialPlacement& partial) {
    if (partial.slots.size() != batch_.size() ||
        partial.routes.size() != batch_.size()) {
      return false;
    }
    for (std::size_t t = 0; t < batch_.size(); ++t) {
      if (partial.slots[t].size() != batch_[t].chain.size() ||
          partial.routes[t].size() != batch_[t].chain.size() + 1) {
        return false;
      }
      for (std::size_t i = 0; i < partial.slots[t].size(); ++i) {
        if (!partial.slots[t][i]) continue;
        int node = first_node_[t] + static_cast<int>(i);
        slot_of_[node] = *partial.slots[t][i];
        ledger_.AddSlotLoad(net_, slot_of_[node], node_bw_[node]);
      }
      for (std::size_t e = 0; e < partial.routes[t].size(); ++e) {
        if (!partial.routes[t][e]) continue;
        const Route& r = *partial.routes[t][e];
        SwitchPath path;
        if (r.empty()) {
          auto ends = EdgeEnds(first_edge_[t] + static_cast<int>(e));
          if (ends.first < 0) return false;
          path = {ends.first};
        } else {
          path.push_back(r.front().from);
          for (const DirectedLink& hop : r) path.push_back(hop.to);
        }
        for (std::size_t h = 1; h < path.size(); ++h) {
          auto link = topo_.FindLink(path[h - 1], path[h]);
          if (!link) return false;
          ledger_.AddLinkLoad(*link, batch_[t].bandwidth_mbps);
        }
        route_of_[first_edge_[t] + e] = std::move(path);
      }
    }
    return true;
  }

  bool Complete() const {
    for (int m : slot_of_) {
      if (m < 0) return false;
    }
    for (const auto& r : route_of_) {
      if (!r) return false;
    }
    return true;
  }

  Assignment CurrentAssignment() const {
    Assignment out;
    for (std::size_t t = 0; t < batch_.size(); ++t) {
      TrafficPlacement p;
      p.request = batch_[t];
      for (std::size_t i = 0; i < batch_[t].chain.size(); ++i) {
        p.slots.push_back(slot_of_[first_node_[t] + i]);
      }
      for (std::size_t e = 0; e <= batch_[t].chain.size(); ++e) {
        p.routes.push_back(ToRoute(*route_of_[first_edge_[t] + e]));
      }
      out.push_back(std::move(p));
    }
    return out;
  }

  CostBreakdown CurrentCost() const {
    Assignment a = CurrentAssignment();
    return EventCost(net_, base_.ledger(), ledger_, a, weights_);
  }

  // Admissible bound on the cost of any completion of the current partial
  // assignment; infinite when some remaining node can no longer be served.
  double Bound() const {
    if (Complete()) return CurrentCost().total;
    const double inf = std::numeric_limits<double>::infinity();
    std::set<int> active = ledger_.ActiveSlots();
    double deployment = DeploymentCost(base_.ledger().ActiveSlots(), active, net_);
    double energy = EnergyCost(active, net_, weights_);

    // Slots that must still open: one per type whose remaining nodes cannot
    // all be absorbed by active slots.
    std::map<int, double> min_bw;
    std::vector<double> resource_left(net_.kind_count(), 0.0);
    for (std::size_t n = 0; n < slot_of_.size(); ++n) {
      if (slot_of_[n] >= 0) continue;
      int p = node_type_[n];
      auto [it, fresh] = min_bw.try_emplace(p, node_bw_[n]);
      if (!fresh) it->second = std::min(it->second, node_bw_[n]);
      for (int k = 0; k < net_.kind_count(); ++k) {
        resource_left[k] += net_.Requirement(p, k);
      }
    }
    double opening = 0.0;
    for (const auto& [p, bw] : min_bw) {
      const double cap = net_.catalog().at(p).capacity_mbps;
      bool absorbed = false;
      double best_open = inf;
      int last_server = -1;
      for (int m : net_.SlotsOfType(p)) {
        if (ledger_.slot_active(m)) {
          if (FitsWithin(ledger_.slot_load(m) + bw, cap)) absorbed = true;
          continue;
        }
        int server = net_.slot(m).server;
        if (server == last_server) continue;
        last_server = server;
        if (!FitsWithin(bw, cap) || !ledger_.CanActivate(net_, m)) continue;
        best_open = std::min(best_open, OpenCostLowerBound(m));
      }
      if (absorbed) continue;
      if (best_open == inf) return inf;
      opening += best_open;
    }

    double forwarding = 0.0;
    double penalty = 0.0;
    double bw_left = 0.0;
    for (std::size_t t = 0; t < batch_.size(); ++t) {
      const TrafficRequest& req = batch_[t];
      double delay = 0.0;
      for (const std::string& type : req.chain) {
        delay += net_.catalog().at(type).proc_delay_ms;
      }
      for (std::size_t e = 0; e <= req.chain.size(); ++e) {
        int edge = first_edge_[t] + static_cast<int>(e);
        if (route_of_[edge]) {
          forwarding += req.bandwidth_mbps * weights_.sigma * HopCount(*route_of_[edge]);
          delay += SwitchPathDelay(topo_, *route_of_[edge]);
          continue;
        }
        bw_left += req.bandwidth_mbps;
        int hops = MinHops(edge);
        if (hops < 0) return inf;
        forwarding += req.bandwidth_mbps * weights_.sigma * hops;
        auto [a, b] = EdgeEnds(edge);
        if (a >= 0 && b >= 0) delay += paths_.MinDelay(a, b);
      }
      penalty += SloPenalty(req, delay);
    }

    double fragmentation = 0.0;
    for (int n = 0; n < topo_.server_count(); ++n) {
      if (!ledger_.server_active(n)) continue;
      for (int k = 0; k < net_.kind_count(); ++k) {
        double cap = topo_.Capacity(n, k);
        if (cap <= 0.0) continue;
        fragmentation +=
            std::max(0.0, cap - ledger_.server_used(n, k) - resource_left[k]) *
            weights_.ResourcePrice(topo_.resource_kinds()[k]);
      }
    }
    for (int l = 0; l < topo_.link_count(); ++l) {
      if (!ledger_.link_active(l)) continue;
      fragmentation += std::max(0.0, topo_.links()[l].bandwidth_mbps -
                                         ledger_.link_load(l) - bw_left) *
                       weights_.bandwidth_price;
    }

    return weights_.alpha * deployment + weights_.beta * energy + opening +
           weights_.gamma * forwarding + weights_.lambda * penalty +
           weights_.mu * fragmentation;
  }

  ExactResult Run() {
    ExactResult result{SolveStatus::kInfeasible, base_, {}, {}, {}, 0};
    if (batch_.empty()) {
      result.status = SolveStatus::kOptimal;
      return result;
    }
    if (auto reason = QuickInfeasibility()) {
      result.message = *reason;
      return result;
    }
    start_ = std::chrono::steady_clock::now();
    Search(0);
    result.nodes_explored = nodes_;
    if (aborted_) {
      result.status = SolveStatus::kLimitExceeded;
      result.message = abort_reason_;
      return result;
    }
    if (!best_) {
      result.message =
          "no assignment satisfies slot, server and link capacities "
          "(Eq.2/Eq.3/Eq.8)";
      return result;
    }
    result.status = SolveStatus::kOptimal;
    result.assignment = best_->assignment;
    result.cost = best_->cost;
    for (const TrafficPlacement& p : result.assignment) result.state.Commit(p);
    return result;
  }

 private:
  struct Incumbent {
    CostBreakdown cost;
    Assignment assignment;
    std::vector<int> slots;
    std::vector<SwitchPath> routes;
  };

  // Deployment plus the part of the activation energy that cannot be shared
  // with other slots opened on the same server.
  double OpenCostLowerBound(int m) const {
    const PseudoVnf& s = net_.slot(m);
    double watts = 0.0;
    if (weights_.idle_mode == IdleEnergyMode::kPerSlot) {
      watts = SlotPowerWatts(net_, m);
    } else {
      for (int k = 0; k < net_.kind_count(); ++k) {
        double cap = topo_.Capacity(s.server, k);
        if (cap <= 0.0) continue;
        const EnergyProfile& e = topo_.Energy(s.server, k);
        watts += (e.peak_w - e.idle_w) * net_.Requirement(s.type, k) / cap;
      }
    }
    return weights_.alpha * net_.catalog().at(s.type).deploy_cost +
           weights_.beta * weights_.dollars_per_watt * watts;
  }

  void PrecomputeTypeDistances() {
    const int types = static_cast<int>(net_.catalog().size());
    const int n = topo_.switch_count();
    type_switches_.assign(types, {});
    for (int p = 0; p < types; ++p) {
      std::set<int> sws;
      for (int m : net_.SlotsOfType(p)) sws.insert(net_.slot(m).switch_index);
      type_switches_[p].assign(sws.begin(), sws.end());
    }
    dist_to_type_.assign(types, std::vector<int>(n, -1));
    for (int p = 0; p < types; ++p) {
      for (int s = 0; s < n; ++s) {
        for (int sw : type_switches_[p]) {
          int h = paths_.Hops(s, sw);
          if (h >= 0 && (dist_to_type_[p][s] < 0 || h < dist_to_type_[p][s])) {
            dist_to_type_[p][s] = h;
          }
        }
      }
    }
  }

  // Switch of each end of a traffic edge, -1 while its slot is unassigned.
  std::pair<int, int> EdgeEnds(int edge) const {
    const int t = edge_traffic_[edge];
    const int e = edge_index_[edge];
    const TrafficRequest& req = batch_[t];
    const int chain = static_cast<int>(req.chain.size());
    auto end = [&](int traffic_node) {
      if (traffic_node == 0) return topo_.SwitchIndex(req.ingress);
      if (traffic_node == chain + 1) return topo_.SwitchIndex(req.egress);
      int slot = slot_of_[first_node_[t] + traffic_node - 1];
      return slot < 0 ? -1 : net_.slot(slot).switch_index;
    };
    return {end(e), end(e + 1)};
  }

  int MinHops(int edge) const {
    auto [a, b] = EdgeEnds(edge);
    const int t = edge_traffic_[edge];
    const int e = edge_index_[edge];
    if (a >= 0 && b >= 0) return paths_.Hops(a, b);
    if (a >= 0) return dist_to_type_[node_type_[first_node_[t] + e]][a];
    if (b >= 0) return dist_to_type_[node_type_[first_node_[t] + e - 1]][b];
    int p = node_type_[first_node_[t] + e - 1];
    int q = node_type_[first_node_[t] + e];
    int best = -1;
    for (int sw : type_switches_[p]) {
      int h = dist_to_type_[q][sw];
      if (h >= 0 && (best < 0 || h < best)) best = h;
    }
    return best;
  }

  std::optional<std::string> QuickInfeasibility() const {
    for (std::size_t n = 0; n < node_type_.size(); ++n) {
      const VnfType& type = net_.catalog().at(node_type_[n]);
      if (net_.SlotsOfType(node_type_[n]).empty()) {
        return "no server may run " + type.id + " (Eq.1)";
      }
      if (!FitsWithin(node_bw_[n], type.capacity_mbps)) {
        return FormatDouble(node_bw_[n]) + " Mbps exceeds the capacity of " +
               type.id + " (Eq.2)";
      }
      bool any = false;
      for (int m : net_.SlotsOfType(node_type_[n])) {
        if (base_.ledger().CanCarry(net_, m, node_bw_[n])) {
          any = true;
          break;
        }
      }
      if (!any) {
        return "no slot of " + type.id + " can take " +
               FormatDouble(node_bw_[n]) + " Mbps (Eq.2/Eq.3)";
      }
    }
    return std::nullopt;
  }

  bool CheckLimits() {
    ++nodes_;
    if (nodes_ > limits_.max_nodes) {
      Abort("search exceeded " + std::to_string(limits_.max_nodes) + " nodes");
    } else if ((nodes_ & 1023) == 0) {
      double elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start_)
                           .count();
      if (elapsed > limits_.time_budget_s) {
        Abort("search exceeded the time budget of " +
              FormatDouble(limits_.time_budget_s) + " s");
      }
    }
    return !aborted_;
  }

  void Abort(std::string reason) {
    if (!aborted_) abort_reason_ = std::move(reason);
    aborted_ = true;
  }

  double Tolerance(double value) const {
    return 1e-9 * std::max(1.0, std::abs(value));
  }

  bool Prunable(double bound) const {
    return best_ && bound > best_->cost.total + Tolerance(best_->cost.total);
  }

  const std::vector<SwitchPath>* RoutesBetween(int a, int b) {
    auto it = route_cache_.find({a, b});
    if (it == route_cache_.end()) {
      auto paths = SimplePaths(topo_, a, b, hop_bound_, limits_.max_routes);
      if (!paths) {
        Abort("more than " + std::to_string(limits_.max_routes) +
              " simple paths between " + topo_.switches()[a] + " and " +
              topo_.switches()[b]);
        return nullptr;
      }
      it = route_cache_.emplace(std::make_pair(a, b), std::move(*paths)).first;
    }
    return &it->second;
  }

  bool PathFits(const SwitchPath& path, double bw) const {
    for (std::size_t h = 1; h < path.size(); ++h) {
      int link = *topo_.FindLink(path[h - 1], path[h]);
      if (!FitsWithin(ledger_.link_load(link) + bw,
                      topo_.links()[link].bandwidth_mbps)) {
        return false;
      }
    }
    return true;
  }

  void Leaf() {
    CostBreakdown cost = CurrentCost();
    std::vector<SwitchPath> routes;
    for (const auto& r : route_of_) routes.push_back(*r);
    bool better = false;
    if (!best_) {
      better = true;
    } else {
      double tol = Tolerance(best_->cost.total);
      if (cost.total < best_->cost.total - tol) {
        better = true;
      } else if (cost.total <= best_->cost.total + tol) {
        better = std::tie(slot_of_, routes) < std::tie(best_->slots, best_->routes);
      }
    }
    if (better) {
      best_ = Incumbent{cost, CurrentAssignment(), slot_of_, std::move(routes)};
    }
  }

  // Depth `d` below slot_count() fixes chain node d; above it, traffic edge
  // d - slot_count().
  void Search(std::size_t d) {
    if (!CheckLimits()) return;
    const std::size_t slot_nodes = slot_of_.size();
    if (d == slot_nodes + route_of_.size()) {
      Leaf();
      return;
    }
    std::vector<std::pair<double, int>> children;
    std::vector<const SwitchPath*> options;
    if (d < slot_nodes) {
      const int p = node_type_[d];
      const double bw = node_bw_[d];
      int last_server = -1;
      for (int m : net_.SlotsOfType(p)) {
        if (!ledger_.slot_active(m)) {
          // Inactive slots of one type on one server are interchangeable.
          int server = net_.slot(m).server;
          if (server == last_server) continue;
          last_server = server;
        }
        if (!ledger_.CanCarry(net_, m, bw)) continue;
        auto cp = ledger_.Checkpoint();
        ledger_.AddSlotLoad(net_, m, bw);
        slot_of_[d] = m;
        double bound = Bound();
        slot_of_[d] = -1;
        ledger_.Rollback(cp);
        if (!Prunable(bound) && bound < std::numeric_limits<double>::infinity()) {
          children.push_back({bound, m});
        }
      }
    } else {
      const int edge = static_cast<int>(d - slot_nodes);
      auto [a, b] = EdgeEnds(edge);
      const double bw = batch_[edge_traffic_[edge]].bandwidth_mbps;
      const std::vector<SwitchPath>* routes = RoutesBetween(a, b);
      if (!routes) return;
      for (std::size_t i = 0; i < routes->size(); ++i) {
        const SwitchPath& path = (*routes)[i];
        if (!PathFits(path, bw)) continue;
        auto cp = ledger_.Checkpoint();
        LoadPath(path, bw);
        route_of_[edge] = path;
        double bound = Bound();
        route_of_[edge].reset();
        ledger_.Rollback(cp);
        if (!Prunable(bound) && bound < std::numeric_limits<double>::infinity()) {
          children.push_back({bound, static_cast<int>(options.size())});
          options.push_back(&path);
        }
      }
    }
    std::stable_sort(children.begin(), children.end());
    for (const auto& [bound, choice] : children) {
      if (aborted_) return;
      if (Prunable(bound)) continue;
      auto cp = ledger_.Checkpoint();
      if (d < slot_nodes) {
        ledger_.AddSlotLoad(net_, choice, node_bw_[d]);
        slot_of_[d] = choice;
        Search(d + 1);
        slot_of_[d] = -1;
      } else {
        const int edge = static_cast<int>(d - slot_nodes);
        const double bw = batch_[edge_traffic_[edge]].bandwidth_mbps;
        LoadPath(*options[choice], bw);
        route_of_[edge] = *options[choice];
        Search(d + 1);
        route_of_[edge].reset();
      }
      ledger_.Rollback(cp);
    }
  }

  void LoadPath(const SwitchPath& path, double bw) {
    for (std::size_t h = 1; h < path.size(); ++h) {
      ledger_.AddLinkLoad(*topo_.FindLink(path[h - 1], path[h]), bw);
    }
  }

  const NetworkState& base_;
  const AugmentedNetwork& net_;
  const Topology& topo_;
  std::vector<TrafficRequest> batch_;
  CostWeights weights_;
  ExactLimits limits_;
  PathTable paths_;
  ResourceLedger ledger_;
  int hop_bound_ = 0;

  std::vector<int> first_node_, first_edge_;
  std::vector<int> node_type_;
  std::vector<double> node_bw_;
  std::vector<int> edge_traffic_, edge_index_;
  std::vector<int> slot_of_;
  std::vector<std::optional<SwitchPath>> route_of_;

  std::vector<std::vector<int>> type_switches_;
  std::vector<std::vector<int>> dist_to_type_;
  std::map<std::pair<int, int>, std::vector<SwitchPath>> route_cache_;

  std::optional<Incumbent> best_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  std::string abort_reason_;
  std::chrono::steady_clock::time_point start_;
};

inline void CheckBatch(const NetworkState& state,
                       std::span<const TrafficRequest> batch) {
  std::set<std::string> ids;
  for (const TrafficRequest& t : batch) {
    ValidateRequest(t, state.network().topology(), state.network().catalog());
    if (state.HasTraffic(t.id) || !ids.insert(t.id).second) {
      throw ValidationError("traffic " + t.id +
                            " is already provisioned or repeated (Eq.6)");
    }
  }
}

}  // namespace detail

// Lower bound on the event cost of any completion of `partial`. Equals the
// event cost when nothing is left open.
inline double LowerBound(const NetworkState& state,
                         std::span<const TrafficRequest> batch,
                         const PartialPlacement& partial, const CostWeights& weights,
                         const ExactLimits& limits = {}) {
  detail::ExactSearch search(state, batch, weights, limits);
  if (!search.Apply(partial)) {
    throw Error("lower_bound: partial placement does not match the batch");
  }
  return search.Bound();
}

// Provably cheapest provisioning of `batch` on top of `state`. Ties are
// broken by the smallest slot-index vector, then the smallest route
// switch sequences.
inline ExactResult SolveExact(const NetworkState& state,
                              std::span<const TrafficRequest> batch,
                              const CostWeights& weights,
                              const ExactLimits& limits = {}) {
  weights.Validate();
  detail::CheckBatch(state, batch);
  detail::ExactSearch search(state, batch, weights, limits);
  return search.Run();
}

}  // namespace vnfop
