#pragma once

// Constraint checker for placements on top of an existing network state.
// Each violation is tagged with the constraint it breaks:
//   Eq.1 slot type not allowed on host     Eq.6 committed traffic modified
//   Eq.2 slot throughput over capacity     Eq.7 edge uses both link directions
//   Eq.3 server resources over capacity    Eq.8 link bandwidth over capacity
//   Eq.4 slot type differs from chain      Eq.9 routing/flow conservation
//   Eq.5 chain node not mapped to one slot

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "vnfop/format.hpp"
#include "vnfop/state.hpp"

namespace vnfop {

struct Violation {
  std::string constraint;
  std::string detail;
};

inline std::string Describe(const std::vector<Violation>& violations) {
  return Join(violations, ';', [](const Violation& v) {
    return v.constraint + ": " + v.detail;
  });
}

inline std::vector<Violation> CheckFeasibility(
    const NetworkState& state, std::span<const TrafficPlacement> assignment) {
  const AugmentedNetwork& net = state.network();
  const Topology& topo = net.topology();
  std::vector<Violation> out;
  std::set<std::string> seen;
  ResourceLedger ledger = state.ledger();

  for (const TrafficPlacement& p : assignment) {
    const TrafficRequest& t = p.request;
    const std::string name = "traffic " + t.id;
    if (state.HasTraffic(t.id)) {
      out.push_back({"Eq.6", name + " is already provisioned"});
    }
    if (!seen.insert(t.id).second) {
      out.push_back({"Eq.6", name + " appears twice"});
    }

    bool slots_ok = p.slots.size() == t.chain.size();
    if (!slots_ok) {
      out.push_back({"Eq.5", name + " maps " + std::to_string(p.slots.size()) +
                                 " slots for a chain of " +
                                 std::to_string(t.chain.size())});
    }
    for (std::size_t i = 0; i < p.slots.size(); ++i) {
      int m = p.slots[i];
      if (m < 0 || m >= net.slot_count()) {
        out.push_back({"Eq.5", name + " chain node " + std::to_string(i + 1) +
                                   " maps to no slot"});
        slots_ok = false;
        continue;
      }
      const PseudoVnf& s = net.slot(m);
      const VnfType& type = net.catalog().at(s.type);
      if (i < t.chain.size() && type.id != t.chain[i]) {
        out.push_back({"Eq.4", name + " chain node " + std::to_string(i + 1) +
                                   " (" + t.chain[i] + ") mapped to " + s.id});
      }
      if (!type.AllowedOn(topo.servers()[s.server].id)) {
        out.push_back({"Eq.1", s.id + " is not allowed on its server"});
      }
    }

    if (p.routes.size() != t.chain.size() + 1) {
      out.push_back({"Eq.9", name + " has " + std::to_string(p.routes.size()) +
                                 " routed edges, expected " +
                                 std::to_string(t.chain.size() + 1)});
      continue;
    }
    if (!slots_ok) continue;

    std::vector<int> z = p.NodeSwitches(net);
    bool links_ok = true;
    for (std::size_t e = 0; e < p.routes.size(); ++e) {
      const Route& r = p.routes[e];
      const std::string edge = name + " edge " + std::to_string(e);
      std::map<int, int> balance;
      std::set<std::pair<int, int>> used;
      for (std::size_t h = 0; h < r.size(); ++h) {
        const DirectedLink& hop = r[h];
        bool known = hop.from >= 0 && hop.from < topo.switch_count() &&
                     hop.to >= 0 && hop.to < topo.switch_count() &&
                     topo.FindLink(hop.from, hop.to).has_value();
        if (!known) {
          out.push_back({"Eq.9", edge + " uses a nonexistent link"});
          links_ok = false;
          continue;
        }
        ++balance[hop.from];
        --balance[hop.to];
        used.insert({hop.from, hop.to});
        if (used.contains({hop.to, hop.from})) {
          out.push_back({"Eq.7", edge + " uses both directions of link (" +
                                     topo.switches()[hop.from] + "," +
                                     topo.switches()[hop.to] + ")"});
        }
        if (h > 0 && r[h - 1].to != hop.from) {
          out.push_back({"Eq.9", edge + " route is not contiguous at hop " +
                                     std::to_string(h)});
        }
      }
      --balance[z[e]];
      ++balance[z[e + 1]];
      for (const auto& [sw, net_out] : balance) {
        // balance now holds out - in - (z_src - z_dst) per switch.
        if (net_out != 0) {
          out.push_back({"Eq.9", edge + " breaks flow conservation at switch " +
                                     topo.switches()[sw]});
          break;
        }
      }
      if (!r.empty() && (r.front().from != z[e] || r.back().to != z[e + 1])) {
        out.push_back({"Eq.9", edge + " does not join its endpoints"});
      }
    }
    if (links_ok) ApplyPlacement(net, p, ledger);
  }

  for (int m = 0; m < net.slot_count(); ++m) {
    const PseudoVnf& s = net.slot(m);
    double cap = net.catalog().at(s.type).capacity_mbps;
    if (!FitsWithin(ledger.slot_load(m), cap)) {
      out.push_back({"Eq.2", s.id + " carries " + FormatDouble(ledger.slot_load(m)) +
                                 " Mbps > " + FormatDouble(cap)});
    }
  }
  for (int n = 0; n < topo.server_count(); ++n) {
    for (int k = 0; k < net.kind_count(); ++k) {
      if (!FitsWithin(ledger.server_used(n, k), topo.Capacity(n, k))) {
        out.push_back({"Eq.3", "server " + topo.servers()[n].id + " uses " +
                                   FormatDouble(ledger.server_used(n, k)) + " " +
                                   topo.resource_kinds()[k] + " > " +
                                   FormatDouble(topo.Capacity(n, k))});
      }
    }
  }
  for (int l = 0; l < topo.link_count(); ++l) {
    double cap = topo.links()[l].bandwidth_mbps;
    if (!FitsWithin(ledger.link_load(l), cap)) {
      out.push_back({"Eq.8", "link (" + topo.links()[l].u + "," +
                                 topo.links()[l].v + ") carries " +
                                 FormatDouble(ledger.link_load(l)) + " Mbps > " +
                                 FormatDouble(cap)});
    }
  }
  return out;
}

}  // namespace vnfop
