#pragma once

// Domain types for the physical network, the VNF catalog and traffic
// requests. Every type validates itself on construction and is immutable
// afterwards.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "vnfop/error.hpp"

namespace vnfop {

inline constexpr std::string_view kCpuCores = "cpu_cores";

struct EnergyProfile {
  double idle_w = 0.0;
  double peak_w = 0.0;

  bool operator==(const EnergyProfile&) const = default;
};

struct ServerSpec {
  std::string id;
  std::string attached_to;
  std::map<std::string, double> capacity;
  std::map<std::string, EnergyProfile> energy;

  bool operator==(const ServerSpec&) const = default;
};

struct Link {
  std::string u;
  std::string v;
  double bandwidth_mbps = 0.0;
  double delay_ms = 0.0;

  bool operator==(const Link&) const = default;
};

// A physical link traversed in a given direction, by switch index.
struct DirectedLink {
  int from = -1;
  int to = -1;

  auto operator<=>(const DirectedLink&) const = default;
};

using Route = std::vector<DirectedLink>;

struct Adjacent {
  int neighbor;
  int link;
};

// Physical network: switches, undirected links and the servers hanging off
// switches. Switches, links and servers are stored in canonical
// (lexicographic) order so that indices double as tie-break order.
class Topology {
 public:
  Topology() = default;

  Topology(std::vector<std::string> switches, std::vector<Link> links,
           std::vector<ServerSpec> servers)
      : switches_(std::move(switches)),
        links_(std::move(links)),
        servers_(std::move(servers)) {
    Canonicalize();
    Validate();
    BuildIndices();
  }

  const std::vector<std::string>& switches() const { return switches_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<ServerSpec>& servers() const { return servers_; }
  // Union of resource kinds declared by any server (the set R), sorted.
  const std::vector<std::string>& resource_kinds() const { return kinds_; }

  int switch_count() const { return static_cast<int>(switches_.size()); }
  int link_count() const { return static_cast<int>(links_.size()); }
  int server_count() const { return static_cast<int>(servers_.size()); }

  std::optional<int> FindSwitch(std::string_view id) const {
    auto it = std::lower_bound(switches_.begin(), switches_.end(), id);
    if (it == switches_.end() || *it != id) return std::nullopt;
    return static_cast<int>(it - switches_.begin());
  }

  int SwitchIndex(std::string_view id) const {
    auto idx = FindSwitch(id);
    if (!idx) throw ValidationError("unknown switch " + std::string(id));
    return *idx;
  }

  std::optional<int> FindServer(std::string_view id) const {
    auto it = std::lower_bound(
        servers_.begin(), servers_.end(), id,
        [](const ServerSpec& s, std::string_view key) { return s.id < key; });
    if (it == servers_.end() || it->id != id) return std::nullopt;
    return static_cast<int>(it - servers_.begin());
  }

  int ServerIndex(std::string_view id) const {
    auto idx = FindServer(id);
    if (!idx) throw ValidationError("unknown server " + std::string(id));
    return *idx;
  }

  std::optional<int> FindKind(std::string_view kind) const {
    auto it = std::lower_bound(kinds_.begin(), kinds_.end(), kind);
    if (it == kinds_.end() || *it != kind) return std::nullopt;
    return static_cast<int>(it - kinds_.begin());
  }

  // Link index joining switches a and b (either orientation).
  std::optional<int> FindLink(int a, int b) const {
    for (const Adjacent& adj : adjacency_.at(a)) {
      if (adj.neighbor == b) return adj.link;
    }
    return std::nullopt;
  }

  std::pair<int, int> LinkEnds(int link) const { return link_ends_.at(link); }

  // Neighbors of a switch sorted by index.
  const std::vector<Adjacent>& Adjacency(int s) const {
    return adjacency_.at(s);
  }

  std::vector<std::string> Neighbors(std::string_view id) const {
    std::vector<std::string> out;
    for (const Adjacent& adj : adjacency_.at(SwitchIndex(id))) {
      out.push_back(switches_[adj.neighbor]);
    }
    return out;
  }

  int ServerSwitch(int server) const { return server_switch_.at(server); }
  const std::vector<int>& ServersAt(int s) const { return servers_at_.at(s); }

  // Capacity of a server for a resource kind index; 0 when undeclared.
  double Capacity(int server, int kind) const {
    return capacity_.at(server).at(kind);
  }
  const EnergyProfile& Energy(int server, int kind) const {
    return energy_.at(server).at(kind);
  }

  bool operator==(const Topology& other) const {
    return switches_ == other.switches_ && links_ == other.links_ &&
           servers_ == other.servers_;
  }

 private:
  void Canonicalize() {
    std::sort(switches_.begin(), switches_.end());
    for (Link& l : links_) {
      if (l.v < l.u) std::swap(l.u, l.v);
    }
    std::sort(links_.begin(), links_.end(), [](const Link& a, const Link& b) {
      return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
    std::sort(servers_.begin(), servers_.end(),
              [](const ServerSpec& a, const ServerSpec& b) {
                return a.id < b.id;
              });
  }

  void Validate() const {
    if (switches_.empty()) throw ValidationError("topology has no switches");
    for (std::size_t i = 1; i < switches_.size(); ++i) {
      if (switches_[i] == switches_[i - 1]) {
        throw ValidationError("duplicate switch " + switches_[i]);
      }
    }
    auto declared = [&](const std::string& s) {
      return std::binary_search(switches_.begin(), switches_.end(), s);
    };
    for (std::size_t i = 0; i < links_.size(); ++i) {
      const Link& l = links_[i];
      std::string name = "link (" + l.u + "," + l.v + ")";
      if (!declared(l.u) || !declared(l.v)) {
        throw ValidationError(name + " references unknown switch " +
                              (declared(l.u) ? l.v : l.u));
      }
      if (l.u == l.v) throw ValidationError(name + " is a self-loop");
      if (i > 0 && links_[i - 1].u == l.u && links_[i - 1].v == l.v) {
        throw ValidationError(name + " is declared twice");
      }
      if (!(l.bandwidth_mbps > 0.0)) {
        throw ValidationError(name + " must have bandwidth_mbps > 0");
      }
      if (!(l.delay_ms >= 0.0)) {
        throw ValidationError(name + " must have delay_ms >= 0");
      }
    }
    for (std::size_t i = 0; i < servers_.size(); ++i) {
      const ServerSpec& s = servers_[i];
      if (i > 0 && servers_[i - 1].id == s.id) {
        throw ValidationError("duplicate server " + s.id);
      }
      if (!declared(s.attached_to)) {
        throw ValidationError("server " + s.id +
                              " attached to unknown switch " + s.attached_to);
      }
      if (s.capacity.empty()) {
        throw ValidationError("server " + s.id + " declares no capacity");
      }
      for (const auto& [kind, amount] : s.capacity) {
        if (!(amount > 0.0)) {
          throw ValidationError("server " + s.id + " capacity for " + kind +
                                " must be > 0");
        }
      }
      for (const auto& [kind, e] : s.energy) {
        if (!s.capacity.contains(kind)) {
          throw ValidationError("server " + s.id + " has energy for " + kind +
                                " but no capacity");
        }
        if (!(e.idle_w >= 0.0) || !(e.peak_w >= e.idle_w)) {
          throw ValidationError("server " + s.id + " energy for " + kind +
                                " must satisfy peak_w >= idle_w >= 0");
        }
      }
    }
  }

  void BuildIndices() {
    std::set<std::string> kinds;
    for (const ServerSpec& s : servers_) {
      for (const auto& [kind, amount] : s.capacity) kinds.insert(kind);
    }
    kinds_.assign(kinds.begin(), kinds.end());

    adjacency_.assign(switches_.size(), {});
    link_ends_.clear();
    for (int i = 0; i < link_count(); ++i) {
      int a = SwitchIndex(links_[i].u);
      int b = SwitchIndex(links_[i].v);
      link_ends_.emplace_back(a, b);
      adjacency_[a].push_back({b, i});
      adjacency_[b].push_back({a, i});
    }
    for (auto& adj : adjacency_) {
      std::sort(adj.begin(), adj.end(), [](const Adjacent& x, const Adjacent& y) {
        return x.neighbor < y.neighbor;
      });
    }

    servers_at_.assign(switches_.size(), {});
    server_switch_.clear();
    capacity_.clear();
    energy_.clear();
    for (int n = 0; n < server_count(); ++n) {
      const ServerSpec& s = servers_[n];
      int sw = SwitchIndex(s.attached_to);
      server_switch_.push_back(sw);
      servers_at_[sw].push_back(n);
      std::vector<double> cap(kinds_.size(), 0.0);
      std::vector<EnergyProfile> energy(kinds_.size());
      for (std::size_t k = 0; k < kinds_.size(); ++k) {
        if (auto it = s.capacity.find(kinds_[k]); it != s.capacity.end()) {
          cap[k] = it->second;
        }
        if (auto it = s.energy.find(kinds_[k]); it != s.energy.end()) {
          energy[k] = it->second;
        }
      }
      capacity_.push_back(std::move(cap));
      energy_.push_back(std::move(energy));
    }
  }

  std::vector<std::string> switches_;
  std::vector<Link> links_;
  std::vector<ServerSpec> servers_;
  std::vector<std::string> kinds_;
  std::vector<std::vector<Adjacent>> adjacency_;
  std::vector<std::pair<int, int>> link_ends_;
  std::vector<int> server_switch_;
  std::vector<std::vector<int>> servers_at_;
  std::vector<std::vector<double>> capacity_;
  std::vector<std::vector<EnergyProfile>> energy_;
};

struct VnfType {
  std::string id;
  double deploy_cost = 0.0;
  std::map<std::string, double> requirements;
  double capacity_mbps = 0.0;
  double proc_delay_ms = 0.0;
  // nullopt means "any server".
  std::optional<std::set<std::string>> allowed_servers;

  bool AllowedOn(std::string_view server) const {
    return !allowed_servers ||
           allowed_servers->contains(std::string(server));
  }

  bool operator==(const VnfType&) const = default;
};

class VnfCatalog {
 public:
  VnfCatalog() = default;

  VnfCatalog(std::vector<VnfType> types, const Topology& topology)
      : types_(std::move(types)) {
    std::sort(types_.begin(), types_.end(),
              [](const VnfType& a, const VnfType& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < types_.size(); ++i) {
      const VnfType& t = types_[i];
      std::string name = "vnf type " + t.id;
      if (t.id.empty()) throw ValidationError("vnf type with empty id");
      if (i > 0 && types_[i - 1].id == t.id) {
        throw ValidationError("duplicate " + name);
      }
      if (!(t.capacity_mbps > 0.0)) {
        throw ValidationError(name + " must have capacity_mbps > 0");
      }
      if (!(t.deploy_cost >= 0.0) || !(t.proc_delay_ms >= 0.0)) {
        throw ValidationError(name +
                              " must have nonnegative deploy_cost and delay");
      }
      bool requires_something = false;
      for (const auto& [kind, amount] : t.requirements) {
        if (!topology.FindKind(kind)) {
          throw ValidationError(name + " requires unknown resource " + kind);
        }
        if (!(amount >= 0.0)) {
          throw ValidationError(name + " requirement for " + kind +
                                " must be >= 0");
        }
        requires_something = requires_something || amount > 0.0;
      }
      if (!requires_something) {
        throw ValidationError(name + " must require a positive resource amount");
      }
      if (t.allowed_servers) {
        if (t.allowed_servers->empty()) {
          throw ValidationError(name + " has an empty allowed_servers list");
        }
        for (const std::string& s : *t.allowed_servers) {
          if (!topology.FindServer(s)) {
            throw ValidationError(name + " allows unknown server " + s);
          }
        }
      }
    }
  }

  const std::vector<VnfType>& types() const { return types_; }
  int size() const { return static_cast<int>(types_.size()); }

  std::optional<int> Find(std::string_view id) const {
    auto it = std::lower_bound(
        types_.begin(), types_.end(), id,
        [](const VnfType& t, std::string_view key) { return t.id < key; });
    if (it == types_.end() || it->id != id) return std::nullopt;
    return static_cast<int>(it - types_.begin());
  }

  int Index(std::string_view id) const {
    auto idx = Find(id);
    if (!idx) throw ValidationError("unknown vnf type " + std::string(id));
    return *idx;
  }

  const VnfType& at(int index) const { return types_.at(index); }
  const VnfType& at(std::string_view id) const { return types_[Index(id)]; }

  bool operator==(const VnfCatalog&) const = default;

 private:
  std::vector<VnfType> types_;
};

struct PenaltyPolicy {
  // Dollars per millisecond of delay beyond the budget, per violation.
  double rate_dollars_per_ms = 0.0;

  bool operator==(const PenaltyPolicy&) const = default;
};

struct TrafficRequest {
  std::string id;
  int arrival_batch = 0;
  std::string ingress;
  std::string egress;
  std::vector<std::string> chain;
  double bandwidth_mbps = 0.0;
  double delay_budget_ms = 0.0;
  PenaltyPolicy penalty;

  bool operator==(const TrafficRequest&) const = default;
};

inline void ValidateRequest(const TrafficRequest& t, const Topology& topology,
                            const VnfCatalog& catalog) {
  std::string name = "traffic " + t.id;
  if (t.id.empty()) throw ValidationError("traffic with empty id");
  if (!topology.FindSwitch(t.ingress)) {
    throw ValidationError(name + " has unknown ingress switch " + t.ingress);
  }
  if (!topology.FindSwitch(t.egress)) {
    throw ValidationError(name + " has unknown egress switch " + t.egress);
  }
  for (const std::string& type : t.chain) {
    if (!catalog.Find(type)) {
      throw ValidationError(name + " chain references unknown vnf type " +
                            type);
    }
  }
  if (!(t.bandwidth_mbps > 0.0)) {
    throw ValidationError(name + " must have bandwidth_mbps > 0");
  }
  if (!(t.delay_budget_ms > 0.0)) {
    throw ValidationError(name + " must have delay_budget_ms > 0");
  }
  if (!(t.penalty.rate_dollars_per_ms >= 0.0)) {
    throw ValidationError(name + " must have penalty_rate >= 0");
  }
}

// Path-shaped traffic model: ingress, one node per chain element, egress.
class TrafficGraph {
 public:
  enum class Role { kIngress, kFunction, kEgress };

  struct Node {
    Role role;
    // Switch id for endpoints, vnf type id for chain nodes.
    std::string label;
  };

  static TrafficGraph Build(const TrafficRequest& t) {
    TrafficGraph g;
    g.nodes_.push_back({Role::kIngress, t.ingress});
    for (const std::string& type : t.chain) {
      g.nodes_.push_back({Role::kFunction, type});
    }
    g.nodes_.push_back({Role::kEgress, t.egress});
    return g;
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i + 1 < node_count(); ++i) out.emplace_back(i, i + 1);
    return out;
  }

  // Adjacent nodes in the path (predecessor first).
  std::vector<int> Neighbors(int n) const {
    std::vector<int> out;
    if (n > 0) out.push_back(n - 1);
    if (n + 1 < node_count()) out.push_back(n + 1);
    return out;
  }

 private:
  std::vector<Node> nodes_;
};

}  // namespace vnfop
