#pragma once

// Reference implementations used only by tests. They recompute costs and
// feasibility from first principles and enumerate every assignment without
// pruning or symmetry breaking.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <span>
#include <vector>

#include "vnfop/augmented.hpp"
#include "vnfop/cost.hpp"
#include "vnfop/state.hpp"

namespace vnfop::testing {

// Every simple path a -> b, by plain depth-first search.
inline std::vector<std::vector<int>> AllSimplePaths(const Topology& topo, int a, int b) {
  std::vector<std::vector<int>> out;
  std::vector<int> path{a};
  std::vector<char> seen(topo.switch_count(), 0);
  seen[a] = 1;
  std::function<void(int)> dfs = [&](int u) {
    if (u == b) {
      out.push_back(path);
      return;
    }
    for (int v = 0; v < topo.switch_count(); ++v) {
      if (seen[v] || !topo.FindLink(u, v)) continue;
      seen[v] = 1;
      path.push_back(v);
      dfs(v);
      path.pop_back();
      seen[v] = 0;
    }
  };
  dfs(a);
  return out;
}

struct OracleLoads {
  std::map<int, double> slot;
  std::map<int, std::map<int, double>> server;  // server -> kind -> used
  std::map<int, double> link;
  std::set<int> active;
};

inline OracleLoads LoadsOf(const AugmentedNetwork& net, std::span<const TrafficPlacement> all) {
  OracleLoads l;
  for (const TrafficPlacement& p : all) {
    for (int m : p.slots) {
      l.slot[m] += p.request.bandwidth_mbps;
      l.active.insert(m);
    }
    for (const Route& r : p.routes) {
      for (const DirectedLink& h : r) {
        l.link[*net.topology().FindLink(h.from, h.to)] += p.request.bandwidth_mbps;
      }
    }
  }
  for (int m : l.active) {
    const PseudoVnf& s = net.slot(m);
    for (int k = 0; k < net.kind_count(); ++k) {
      l.server[s.server][k] += net.Requirement(s.type, k);
    }
  }
  return l;
}

inline bool OracleFeasible(const AugmentedNetwork& net, std::span<const TrafficPlacement> all) {
  OracleLoads l = LoadsOf(net, all);
  const double eps = 1e-9;
  for (const auto& [m, load] : l.slot) {
    if (load > net.catalog().at(net.slot(m).type).capacity_mbps * (1 + eps)) return false;
  }
  for (const auto& [n, kinds] : l.server) {
    for (const auto& [k, used] : kinds) {
      if (used > net.topology().Capacity(n, k) * (1 + eps)) return false;
    }
  }
  for (const auto& [link, load] : l.link) {
    if (load > net.topology().links()[link].bandwidth_mbps * (1 + eps)) return false;
  }
  return true;
}

// Event cost of adding `added` on top of `base`, from the definitions.
inline CostBreakdown OracleCost(const AugmentedNetwork& net,
                                std::span<const TrafficPlacement> base,
                                std::span<const TrafficPlacement> added,
                                const CostWeights& w) {
  const Topology& topo = net.topology();
  std::vector<TrafficPlacement> all(base.begin(), base.end());
  all.insert(all.end(), added.begin(), added.end());
  OracleLoads before = LoadsOf(net, base);
  OracleLoads after = LoadsOf(net, all);
  CostBreakdown c;
  for (int m : after.active) {
    if (!before.active.contains(m)) c.deployment += net.catalog().at(net.slot(m).type).deploy_cost;
  }
  // Energy.
  std::map<int, std::vector<int>> by_server;
  for (int m : after.active) by_server[net.slot(m).server].push_back(m);
  for (const auto& [n, slots] : by_server) {
    for (int k = 0; k < net.kind_count(); ++k) {
      double cap = topo.Capacity(n, k);
      if (cap <= 0) continue;
      const EnergyProfile& e = topo.Energy(n, k);
      double used = 0;
      for (int m : slots) used += net.Requirement(net.slot(m).type, k);
      if (w.idle_mode == IdleEnergyMode::kPerSlot) {
        c.energy += (e.peak_w - e.idle_w) * used / cap + e.idle_w * slots.size();
      } else {
        c.energy += (e.peak_w - e.idle_w) * used / cap + e.idle_w;
      }
    }
  }
  c.energy *= w.dollars_per_watt;
  for (const TrafficPlacement& p : added) {
    double delay = 0;
    int hops = 0;
    for (const Route& r : p.routes) {
      for (const DirectedLink& h : r) {
        delay += topo.links()[*topo.FindLink(h.from, h.to)].delay_ms;
        ++hops;
      }
    }
    for (const std::string& type : p.request.chain) delay += net.catalog().at(type).proc_delay_ms;
    c.forwarding += hops * p.request.bandwidth_mbps * w.sigma;
    c.penalty += p.request.penalty.rate_dollars_per_ms *
                 std::max(0.0, delay - p.request.delay_budget_ms);
  }
  for (const auto& [n, kinds] : after.server) {
    for (int k = 0; k < net.kind_count(); ++k) {
      double cap = topo.Capacity(n, k);
      if (cap <= 0) continue;
      double used = kinds.contains(k) ? kinds.at(k) : 0.0;
      c.fragmentation += (cap - used) * w.ResourcePrice(topo.resource_kinds()[k]);
    }
  }
  for (const auto& [link, load] : after.link) {
    if (load > 0) c.fragmentation += (topo.links()[link].bandwidth_mbps - load) * w.bandwidth_price;
  }
  c.total = w.alpha * c.deployment + w.beta * c.energy + w.gamma * c.forwarding +
            w.lambda * c.penalty + w.mu * c.fragmentation;
  return c;
}

struct BruteForceResult {
  bool feasible = false;
  CostBreakdown cost;
  Assignment assignment;
  long long evaluated = 0;
};

// Exhaustive search over every slot of the right type for every chain node
// and every simple path for every traffic edge. Ties go to the smallest slot
// vector, then the smallest route switch sequences.
inline BruteForceResult BruteForce(const AugmentedNetwork& net,
                                   std::span<const TrafficPlacement> base,
                                   std::span<const TrafficRequest> batch,
                                   const CostWeights& w) {
  const Topology& topo = net.topology();
  struct Node { int traffic, index; };
  std::vector<Node> nodes;
  for (std::size_t t = 0; t < batch.size(); ++t) {
    for (std::size_t i = 0; i < batch[t].chain.size(); ++i) {
      nodes.push_back({static_cast<int>(t), static_cast<int>(i)});
    }
  }
  BruteForceResult best;
  std::vector<int> slots(nodes.size());
  std::vector<int> best_slots;
  std::vector<std::vector<int>> best_routes;

  std::function<void(std::size_t)> pick_slot = [&](std::size_t d) {
    if (d < nodes.size()) {
      int type = net.catalog().Index(batch[nodes[d].traffic].chain[nodes[d].index]);
      for (int m = 0; m < net.slot_count(); ++m) {
        if (net.slot(m).type != type) continue;
        slots[d] = m;
        pick_slot(d + 1);
      }
      return;
    }
    // Endpoints of every traffic edge.
    std::vector<std::pair<int, int>> ends;
    std::vector<int> edge_traffic;
    std::size_t cursor = 0;
    for (std::size_t t = 0; t < batch.size(); ++t) {
      std::vector<int> z{topo.SwitchIndex(batch[t].ingress)};
      for (std::size_t i = 0; i < batch[t].chain.size(); ++i) {
        z.push_back(net.slot(slots[cursor++]).switch_index);
      }
      z.push_back(topo.SwitchIndex(batch[t].egress));
      for (std::size_t e = 0; e + 1 < z.size(); ++e) {
        ends.push_back({z[e], z[e + 1]});
        edge_traffic.push_back(static_cast<int>(t));
      }
    }
    std::vector<std::vector<std::vector<int>>> options;
    for (auto [a, b] : ends) options.push_back(AllSimplePaths(topo, a, b));
    std::vector<std::vector<int>> chosen(ends.size());
    std::function<void(std::size_t)> pick_route = [&](std::size_t e) {
      if (e < ends.size()) {
        for (const auto& p : options[e]) {
          chosen[e] = p;
          pick_route(e + 1);
        }
        return;
      }
      ++best.evaluated;
      Assignment a;
      std::size_t node = 0, edge = 0;
      for (std::size_t t = 0; t < batch.size(); ++t) {
        TrafficPlacement p;
        p.request = batch[t];
        for (std::size_t i = 0; i < batch[t].chain.size(); ++i) p.slots.push_back(slots[node++]);
        for (std::size_t i = 0; i <= batch[t].chain.size(); ++i) {
          Route r;
          const auto& path = chosen[edge++];
          for (std::size_t h = 1; h < path.size(); ++h) r.push_back({path[h - 1], path[h]});
          p.routes.push_back(r);
        }
        a.push_back(p);
      }
      std::vector<TrafficPlacement> all(base.begin(), base.end());
      all.insert(all.end(), a.begin(), a.end());
      if (!OracleFeasible(net, all)) return;
      CostBreakdown c = OracleCost(net, base, a, w);
      bool better = !best.feasible;
      if (best.feasible) {
        double tol = 1e-9 * std::max(1.0, std::abs(best.cost.total));
        if (c.total < best.cost.total - tol) {
          better = true;
        } else if (c.total <= best.cost.total + tol) {
          better = std::tie(slots, chosen) < std::tie(best_slots, best_routes);
        }
      }
      if (better) {
        best.feasible = true;
        best.cost = c;
        best.assignment = a;
        best_slots = slots;
        best_routes = chosen;
      }
    };
    pick_route(0);
  };
  pick_slot(0);
  return best;
}

}  // namespace vnfop::testing
