#pragma once

// Provisioned traffic and the resources it holds.

#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vnfop/augmented.hpp"
#include "vnfop/cost.hpp"
#include "vnfop/ledger.hpp"
#include "vnfop/model.hpp"

namespace vnfop {

// Where one traffic's chain runs and how it is routed.
//   slots[i]  : slot hosting chain element i
//   routes[e] : physical links carrying traffic edge e, where edge e joins
//               traffic node e to node e + 1 (ingress is node 0)
struct TrafficPlacement {
  TrafficRequest request;
  std::vector<int> slots;
  std::vector<Route> routes;

  // Switch each traffic node is attached to (ingress, chain..., egress).
  std::vector<int> NodeSwitches(const AugmentedNetwork& net) const {
    const Topology& topo = net.topology();
    std::vector<int> out{topo.SwitchIndex(request.ingress)};
    for (int m : slots) out.push_back(net.slot(m).switch_index);
    out.push_back(topo.SwitchIndex(request.egress));
    return out;
  }

  // End-to-end delay: links of every edge plus chain processing.
  double Delay(const AugmentedNetwork& net) const {
    Route all;
    for (const Route& r : routes) all.insert(all.end(), r.begin(), r.end());
    return PathDelay(net.topology(), all, request.chain, net.catalog());
  }

  int Hops() const {
    int hops = 0;
    for (const Route& r : routes) hops += static_cast<int>(r.size());
    return hops;
  }

  bool operator==(const TrafficPlacement&) const = default;
};

using Assignment = std::vector<TrafficPlacement>;

// Loads a placement onto a ledger without any capacity check.
inline void ApplyPlacement(const AugmentedNetwork& net, const TrafficPlacement& p,
                           ResourceLedger& ledger) {
  const double bw = p.request.bandwidth_mbps;
  for (int m : p.slots) ledger.AddSlotLoad(net, m, bw);
  for (const Route& r : p.routes) {
    for (const DirectedLink& hop : r) {
      ledger.AddLinkLoad(*net.topology().FindLink(hop.from, hop.to), bw);
    }
  }
}

// Accumulated provisioning over all events. Committed placements are never
// modified or removed.
class NetworkState {
 public:
  explicit NetworkState(std::shared_ptr<const AugmentedNetwork> net)
      : net_(std::move(net)), ledger_(*net_) {}

  const AugmentedNetwork& network() const { return *net_; }
  const std::shared_ptr<const AugmentedNetwork>& network_ptr() const {
    return net_;
  }
  const ResourceLedger& ledger() const { return ledger_; }
  const Assignment& placements() const { return placements_; }

  bool HasTraffic(const std::string& id) const {
    for (const TrafficPlacement& p : placements_) {
      if (p.request.id == id) return true;
    }
    return false;
  }

  std::set<int> ActiveSlots() const { return ledger_.ActiveSlots(); }

  double SlotResidual(int m) const {
    return net_->catalog().at(net_->slot(m).type).capacity_mbps -
           ledger_.slot_load(m);
  }
  double LinkResidual(int link) const {
    return net_->topology().links()[link].bandwidth_mbps - ledger_.link_load(link);
  }
  double ServerResidual(int server, int kind) const {
    return net_->topology().Capacity(server, kind) - ledger_.server_used(server, kind);
  }

  int ActiveServerCount() const {
    int count = 0;
    for (int n = 0; n < net_->topology().server_count(); ++n) {
      count += ledger_.server_active(n) ? 1 : 0;
    }
    return count;
  }

  // Records a placement. Callers are responsible for feasibility.
  void Commit(TrafficPlacement placement) {
    ApplyPlacement(*net_, placement, ledger_);
    ledger_.ClearHistory();
    placements_.push_back(std::move(placement));
  }

 private:
  std::shared_ptr<const AugmentedNetwork> net_;
  ResourceLedger ledger_;
  Assignment placements_;
};

// Cost of one provisioning event taking the network from `before` to
// `after` by adding `added`. Deployment and forwarding only count what the
// event provisions; energy and fragmentation describe the resulting network;
// the penalty covers the added traffic.
inline CostBreakdown EventCost(const AugmentedNetwork& net,
                               const ResourceLedger& before,
                               const ResourceLedger& after,
                               std::span<const TrafficPlacement> added,
                               const CostWeights& weights) {
  CostBreakdown c;
  std::set<int> now = after.ActiveSlots();
  c.deployment = DeploymentCost(before.ActiveSlots(), now, net);
  c.energy = EnergyCost(now, net, weights);
  std::vector<LinkLoad> loads;
  for (const TrafficPlacement& p : added) {
    for (const Route& r : p.routes) {
      for (const DirectedLink& hop : r) {
        loads.push_back({*net.topology().FindLink(hop.from, hop.to),
                         p.request.bandwidth_mbps});
      }
    }
    c.penalty += SloPenalty(p.request, p.Delay(net));
  }
  c.forwarding = ForwardingCost(loads, weights.sigma);
  c.fragmentation = FragmentationCost(net, after, weights);
  return TotalCost(c, weights);
}

inline CostBreakdown EventCost(const NetworkState& before,
                               const NetworkState& after,
                               std::span<const TrafficPlacement> added,
                               const CostWeights& weights) {
  return EventCost(before.network(), before.ledger(), after.ledger(), added,
                   weights);
}

}  // namespace vnfop
