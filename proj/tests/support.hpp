#pragma once

#include <algorithm>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vnfop/augmented.hpp"
#include "vnfop/model.hpp"
#include "vnfop/model_io.hpp"

namespace vnfop::testing {

inline std::string DataPath(const std::string& rel) {
  return std::string(VNFOP_DATA_DIR) + "/" + rel;
}

struct Instance {
  std::shared_ptr<const AugmentedNetwork> net;
  std::vector<TrafficRequest> traffic;
};

inline Instance LoadInstance(const std::string& dir, const std::string& traffic_file) {
  Topology topo = LoadTopology(ReadFile(DataPath(dir + "/topology.json")));
  VnfCatalog cat = LoadCatalog(ReadFile(DataPath(dir + "/catalog.json")), topo);
  auto net = EnumerateVnfs(topo, cat);
  auto traffic = LoadTraffic(ReadFile(DataPath(dir + "/" + traffic_file)),
                             net->topology(), net->catalog());
  return {net, traffic};
}

inline Instance WorkedExample() { return LoadInstance("worked_example", "traffic.csv"); }

inline EnergyProfile ReferenceServer() { return {80.5, 2735.0}; }

inline ServerSpec Server(std::string id, std::string sw, double cores = 16) {
  return {std::move(id), std::move(sw), {{"cpu_cores", cores}},
          {{"cpu_cores", ReferenceServer()}}};
}

inline VnfType Vnf(std::string id, double deploy, double cores, double cap,
                   double delay = 0.0) {
  return {std::move(id), deploy, {{"cpu_cores", cores}}, cap, delay, std::nullopt};
}

inline TrafficRequest Request(std::string id, std::string in, std::string out,
                              std::vector<std::string> chain, double bw,
                              double budget = 1000.0, double rate = 1.0) {
  TrafficRequest t;
  t.id = std::move(id);
  t.ingress = std::move(in);
  t.egress = std::move(out);
  t.chain = std::move(chain);
  t.bandwidth_mbps = bw;
  t.delay_budget_ms = budget;
  t.penalty.rate_dollars_per_ms = rate;
  return t;
}

struct RandomShape {
  int min_switches = 4, max_switches = 8;
  int min_servers = 1, max_servers = 3;
  int min_chain = 1, max_chain = 3;
  int min_traffic = 1, max_traffic = 4;
  double extra_link_probability = 0.25;
  int min_core_quads = 2, max_core_quads = 4;  // server cores / 4
  double bandwidth_scale = 1.0;
};

// Connected random topology with reference servers, the four standard VNF
// types, and one batch of traffic.
inline Instance RandomInstance(std::mt19937_64& rng, const RandomShape& shape = {}) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto real = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const int n = pick(shape.min_switches, shape.max_switches);
  std::vector<std::string> sw;
  for (int i = 0; i < n; ++i) sw.push_back("s" + std::to_string(i));
  std::vector<Link> links;
  std::set<std::pair<int, int>> seen;
  auto add = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    if (a == b || !seen.insert({a, b}).second) return;
    links.push_back({sw[a], sw[b], static_cast<double>(pick(2, 10) * 1000),
                     static_cast<double>(pick(1, 5))});
  };
  for (int i = 1; i < n; ++i) add(i, pick(0, i - 1));
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (real(0, 1) < shape.extra_link_probability) add(a, b);
    }
  }
  const int servers = pick(shape.min_servers, shape.max_servers);
  std::vector<int> hosts(n);
  for (int i = 0; i < n; ++i) hosts[i] = i;
  std::shuffle(hosts.begin(), hosts.end(), rng);
  std::vector<ServerSpec> specs;
  for (int i = 0; i < servers; ++i) {
    specs.push_back(Server("n" + std::to_string(i), sw[hosts[i % n]],
                           static_cast<double>(pick(shape.min_core_quads, shape.max_core_quads) * 4)));
  }
  Topology topo(sw, links, specs);
  std::vector<VnfType> types{Vnf("firewall", pick(5, 30), 4, 900, 0.5),
                             Vnf("ids", pick(5, 30), 8, 600, 1.0),
                             Vnf("nat", pick(5, 30), 2, 900, 0.2),
                             Vnf("proxy", pick(5, 30), 4, 900, 0.5)};
  VnfCatalog cat(types, topo);
  auto net = EnumerateVnfs(topo, cat);

  std::vector<TrafficRequest> batch;
  const int count = pick(shape.min_traffic, shape.max_traffic);
  const std::vector<std::string> names{"firewall", "ids", "nat", "proxy"};
  for (int i = 0; i < count; ++i) {
    std::vector<std::string> chain;
    int len = pick(shape.min_chain, shape.max_chain);
    for (int k = 0; k < len; ++k) chain.push_back(names[pick(0, 3)]);
    batch.push_back(Request("t" + std::to_string(i), sw[pick(0, n - 1)],
                            sw[pick(0, n - 1)], chain,
                            shape.bandwidth_scale * pick(1, 6) * 50, real(10, 60),
                            real(0.5, 3.0)));
  }
  return {net, batch};
}

}  // namespace vnfop::testing
