#pragma once

// Cost model: deployment, energy, forwarding, SLO penalty and resource
// fragmentation, plus their weighted sum. All amounts are dollars except
// where a name says otherwise.

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "vnfop/augmented.hpp"
#include "vnfop/error.hpp"
#include "vnfop/ledger.hpp"
#include "vnfop/model.hpp"

namespace vnfop {

// How idle power is attributed when several slots share a server.
enum class IdleEnergyMode {
  kPerSlot,    // every active slot pays the server's idle power
  kPerServer,  // idle power is paid once per active server
};

struct CostWeights {
  double alpha = 1.0;   // deployment
  double beta = 1.0;    // energy
  double gamma = 1.0;   // forwarding
  double lambda = 1.0;  // SLO penalty
  double mu = 1.0;      // fragmentation
  double sigma = 0.01;  // $ per Mbit per link
  std::map<std::string, double> resource_price;  // missing kinds cost 1.0
  double bandwidth_price = 1.0;
  double dollars_per_watt = 1.0;
  IdleEnergyMode idle_mode = IdleEnergyMode::kPerSlot;

  double ResourcePrice(const std::string& kind) const {
    auto it = resource_price.find(kind);
    return it == resource_price.end() ? 1.0 : it->second;
  }

  void Validate() const {
    for (double w : {alpha, beta, gamma, lambda, mu, sigma, bandwidth_price,
                     dollars_per_watt}) {
      if (!(w >= 0.0)) throw ValidationError("cost weights must be nonnegative");
    }
    for (const auto& [kind, price] : resource_price) {
      if (!(price >= 0.0)) {
        throw ValidationError("resource price for " + kind +
                              " must be nonnegative");
      }
    }
  }
};

struct CostBreakdown {
  double deployment = 0.0;
  double energy = 0.0;
  double forwarding = 0.0;
  double penalty = 0.0;
  double fragmentation = 0.0;
  double total = 0.0;

  bool operator==(const CostBreakdown&) const = default;
};

// Power draw of a resource with `total` capacity of which `consumed` is in
// use: linear between idle and peak.
inline double EnergyFraction(double total, double consumed, double idle_w,
                             double peak_w) {
  if (!(total > 0.0)) throw Error("energy_fraction: total must be > 0");
  if (consumed < 0.0 || consumed > total) {
    throw Error("energy_fraction: consumed must lie in [0, total]");
  }
  return (peak_w - idle_w) * consumed / total + idle_w;
}

// Deployment cost of the slots active in `now` but not in `prev`.
inline double DeploymentCost(const std::set<int>& prev, const std::set<int>& now,
                             const AugmentedNetwork& net) {
  if (!std::includes(now.begin(), now.end(), prev.begin(), prev.end())) {
    throw Error("deployment_cost: previously active slots were deallocated");
  }
  double cost = 0.0;
  for (int m : now) {
    if (!prev.contains(m)) cost += net.catalog().at(net.slot(m).type).deploy_cost;
  }
  return cost;
}

// Watts drawn by one active slot on its host, summed over resource kinds
// (per-slot idle attribution).
inline double SlotPowerWatts(const AugmentedNetwork& net, int m) {
  const PseudoVnf& s = net.slot(m);
  const Topology& topo = net.topology();
  double watts = 0.0;
  for (int k = 0; k < net.kind_count(); ++k) {
    double cap = topo.Capacity(s.server, k);
    if (cap <= 0.0) continue;
    const EnergyProfile& e = topo.Energy(s.server, k);
    watts += EnergyFraction(cap, net.Requirement(s.type, k), e.idle_w, e.peak_w);
  }
  return watts;
}

// Watts drawn by a server whose active slots consume `used` per kind, with
// idle power counted once.
inline double ServerPowerWatts(const AugmentedNetwork& net, int server,
                               std::span<const double> used) {
  const Topology& topo = net.topology();
  double watts = 0.0;
  for (int k = 0; k < net.kind_count(); ++k) {
    double cap = topo.Capacity(server, k);
    if (cap <= 0.0) continue;
    const EnergyProfile& e = topo.Energy(server, k);
    watts += EnergyFraction(cap, std::min(used[k], cap), e.idle_w, e.peak_w);
  }
  return watts;
}

// Energy cost of the active slot set. Servers without active slots cost
// nothing.
inline double EnergyCost(const std::set<int>& active, const AugmentedNetwork& net,
                         const CostWeights& weights) {
  double watts = 0.0;
  if (weights.idle_mode == IdleEnergyMode::kPerSlot) {
    for (int m : active) watts += SlotPowerWatts(net, m);
  } else {
    const int servers = net.topology().server_count();
    std::vector<std::vector<double>> used(servers,
                                          std::vector<double>(net.kind_count()));
    std::vector<char> busy(servers, 0);
    for (int m : active) {
      const PseudoVnf& s = net.slot(m);
      busy[s.server] = 1;
      for (int k = 0; k < net.kind_count(); ++k) {
        used[s.server][k] += net.Requirement(s.type, k);
      }
    }
    for (int n = 0; n < servers; ++n) {
      if (busy[n]) watts += ServerPowerWatts(net, n, used[n]);
    }
  }
  return watts * weights.dollars_per_watt;
}

struct LinkLoad {
  int link = -1;
  double bandwidth_mbps = 0.0;
};

// Cost of newly provisioned (link, traffic) pairs.
inline double ForwardingCost(std::span<const LinkLoad> new_loads, double sigma) {
  double cost = 0.0;
  for (const LinkLoad& l : new_loads) cost += l.bandwidth_mbps * sigma;
  return cost;
}

// Linear penalty: rate times the delay in excess of the budget.
inline double SloPenalty(const PenaltyPolicy& policy, double budget_ms,
                         double actual_ms) {
  if (actual_ms < 0.0) throw Error("slo_penalty: negative delay");
  return policy.rate_dollars_per_ms * std::max(0.0, actual_ms - budget_ms);
}

inline double SloPenalty(const TrafficRequest& t, double actual_ms) {
  return SloPenalty(t.penalty, t.delay_budget_ms, actual_ms);
}

// Sum of link propagation delays along a contiguous route plus processing
// delay of each chain function.
inline double PathDelay(const Topology& topo, std::span<const DirectedLink> route,
                        std::span<const std::string> chain,
                        const VnfCatalog& catalog) {
  double delay = 0.0;
  for (std::size_t i = 0; i < route.size(); ++i) {
    if (i > 0 && route[i].from != route[i - 1].to) {
      throw Error("path_delay: route is not contiguous at hop " +
                  std::to_string(i));
    }
    if (route[i].from < 0 || route[i].from >= topo.switch_count() ||
        route[i].to < 0 || route[i].to >= topo.switch_count()) {
      throw Error("path_delay: hop " + std::to_string(i) +
                  " references an unknown switch");
    }
    auto link = topo.FindLink(route[i].from, route[i].to);
    if (!link) {
      throw Error("path_delay: no link between " +
                  topo.switches()[route[i].from] + " and " +
                  topo.switches()[route[i].to]);
    }
    delay += topo.links()[*link].delay_ms;
  }
  for (const std::string& type : chain) delay += catalog.at(type).proc_delay_ms;
  return delay;
}

// Priced idle capacity on active servers and links.
inline double FragmentationCost(const AugmentedNetwork& net,
                                const ResourceLedger& ledger,
                                const CostWeights& weights) {
  const Topology& topo = net.topology();
  double cost = 0.0;
  for (int n = 0; n < topo.server_count(); ++n) {
    if (!ledger.server_active(n)) continue;
    for (int k = 0; k < net.kind_count(); ++k) {
      double cap = topo.Capacity(n, k);
      if (cap <= 0.0) continue;
      cost += std::max(0.0, cap - ledger.server_used(n, k)) *
              weights.ResourcePrice(topo.resource_kinds()[k]);
    }
  }
  for (int l = 0; l < topo.link_count(); ++l) {
    if (!ledger.link_active(l)) continue;
    cost += std::max(0.0, topo.links()[l].bandwidth_mbps - ledger.link_load(l)) *
            weights.bandwidth_price;
  }
  return cost;
}

// Fills in `total` as the weighted sum of the components.
inline CostBreakdown TotalCost(CostBreakdown parts, const CostWeights& w) {
  parts.total = w.alpha * parts.deployment + w.beta * parts.energy +
                w.gamma * parts.forwarding + w.lambda * parts.penalty +
                w.mu * parts.fragmentation;
  return parts;
}

}  // namespace vnfop
