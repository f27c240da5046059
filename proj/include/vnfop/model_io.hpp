#pragma once

// Reading and writing the topology, catalog and traffic documents.
//
// Topology (JSON):
//   {"switches": [ids],
//    "links": [{"u", "v", "bandwidth_mbps", "delay_ms"}],
//    "servers": [{"id", "attached_to", "capacity": {kind: amount},
//                 "energy": {kind: {"idle_w", "peak_w"}}}]}
// Catalog (JSON): [{"id", "deploy_cost", "requirements": {kind: amount},
//                   "capacity_mbps", "proc_delay_ms",
//                   "allowed_servers": [ids] | "any"}]
// Traffic (CSV):
//   id,arrival_batch,ingress,egress,chain,bandwidth_mbps,delay_budget_ms,penalty_rate
// where chain is a '|'-separated list of vnf type ids (empty for none).

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vnfop/error.hpp"
#include "vnfop/format.hpp"
#include "vnfop/model.hpp"

namespace vnfop {

using Json = nlohmann::json;

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

namespace detail {

inline Json ParseJsonText(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(std::string(what) + ": syntax error at line " +
                     std::to_string(line) + ", column " + std::to_string(col));
  }
}

inline const Json& Field(const Json& obj, const char* key,
                         const std::string& ctx) {
  if (!obj.is_object()) throw ParseError(ctx + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(ctx + ": missing field '" + key + "'");
  }
  return *it;
}

inline double Number(const Json& v, const std::string& ctx) {
  if (!v.is_number()) throw ParseError(ctx + ": expected a number");
  return v.get<double>();
}

inline std::string String(const Json& v, const std::string& ctx) {
  if (v.is_string()) return v.get<std::string>();
  // Numeric ids are accepted for convenience.
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError(ctx + ": expected a string");
}

inline const Json& Array(const Json& v, const std::string& ctx) {
  if (!v.is_array()) throw ParseError(ctx + ": expected an array");
  return v;
}

inline std::map<std::string, double> AmountMap(const Json& v,
                                               const std::string& ctx) {
  if (!v.is_object()) throw ParseError(ctx + ": expected an object");
  std::map<std::string, double> out;
  for (const auto& [k, amount] : v.items()) {
    out[k] = Number(amount, ctx + "." + k);
  }
  return out;
}

}  // namespace detail

inline Topology TopologyFromJson(const Json& doc) {
  using namespace detail;
  std::vector<std::string> switches;
  const Json& sw = Array(Field(doc, "switches", "topology"), "switches");
  for (std::size_t i = 0; i < sw.size(); ++i) {
    switches.push_back(String(sw[i], "switches[" + std::to_string(i) + "]"));
  }
  std::vector<Link> links;
  const Json& lk = Array(Field(doc, "links", "topology"), "links");
  for (std::size_t i = 0; i < lk.size(); ++i) {
    std::string ctx = "links[" + std::to_string(i) + "]";
    Link l;
    l.u = String(Field(lk[i], "u", ctx), ctx + ".u");
    l.v = String(Field(lk[i], "v", ctx), ctx + ".v");
    l.bandwidth_mbps =
        Number(Field(lk[i], "bandwidth_mbps", ctx), ctx + ".bandwidth_mbps");
    l.delay_ms = Number(Field(lk[i], "delay_ms", ctx), ctx + ".delay_ms");
    links.push_back(std::move(l));
  }
  std::vector<ServerSpec> servers;
  const Json& sv = Array(Field(doc, "servers", "topology"), "servers");
  for (std::size_t i = 0; i < sv.size(); ++i) {
    std::string ctx = "servers[" + std::to_string(i) + "]";
    ServerSpec s;
    s.id = String(Field(sv[i], "id", ctx), ctx + ".id");
    s.attached_to =
        String(Field(sv[i], "attached_to", ctx), ctx + ".attached_to");
    s.capacity = AmountMap(Field(sv[i], "capacity", ctx), ctx + ".capacity");
    if (sv[i].contains("energy")) {
      const Json& e = sv[i]["energy"];
      if (!e.is_object()) throw ParseError(ctx + ".energy: expected an object");
      for (const auto& [kind, profile] : e.items()) {
        std::string ectx = ctx + ".energy." + kind;
        s.energy[kind] = {Number(Field(profile, "idle_w", ectx), ectx + ".idle_w"),
                          Number(Field(profile, "peak_w", ectx), ectx + ".peak_w")};
      }
    }
    servers.push_back(std::move(s));
  }
  return Topology(std::move(switches), std::move(links), std::move(servers));
}

inline Topology LoadTopology(std::string_view text) {
  return TopologyFromJson(detail::ParseJsonText(text, "topology"));
}

inline Json TopologyToJson(const Topology& topo) {
  Json links = Json::array();
  for (const Link& l : topo.links()) {
    links.push_back({{"u", l.u},
                     {"v", l.v},
                     {"bandwidth_mbps", l.bandwidth_mbps},
                     {"delay_ms", l.delay_ms}});
  }
  Json servers = Json::array();
  for (const ServerSpec& s : topo.servers()) {
    Json energy = Json::object();
    for (const auto& [kind, e] : s.energy) {
      energy[kind] = {{"idle_w", e.idle_w}, {"peak_w", e.peak_w}};
    }
    servers.push_back({{"id", s.id},
                       {"attached_to", s.attached_to},
                       {"capacity", s.capacity},
                       {"energy", energy}});
  }
  return {{"switches", topo.switches()}, {"links", links}, {"servers", servers}};
}

inline std::string SerializeTopology(const Topology& topo) {
  return TopologyToJson(topo).dump(2) + "\n";
}

inline VnfCatalog CatalogFromJson(const Json& doc, const Topology& topology) {
  using namespace detail;
  const Json& arr = Array(doc, "catalog");
  std::vector<VnfType> types;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string ctx = "catalog[" + std::to_string(i) + "]";
    VnfType t;
    t.id = String(Field(arr[i], "id", ctx), ctx + ".id");
    t.deploy_cost = Number(Field(arr[i], "deploy_cost", ctx), ctx + ".deploy_cost");
    t.requirements =
        AmountMap(Field(arr[i], "requirements", ctx), ctx + ".requirements");
    t.capacity_mbps =
        Number(Field(arr[i], "capacity_mbps", ctx), ctx + ".capacity_mbps");
    t.proc_delay_ms = arr[i].contains("proc_delay_ms")
                          ? Number(arr[i]["proc_delay_ms"], ctx + ".proc_delay_ms")
                          : 0.0;
    if (arr[i].contains("allowed_servers")) {
      const Json& allowed = arr[i]["allowed_servers"];
      if (allowed.is_string() && allowed.get<std::string>() == "any") {
        t.allowed_servers.reset();
      } else if (allowed.is_array()) {
        std::set<std::string> ids;
        for (std::size_t j = 0; j < allowed.size(); ++j) {
          ids.insert(String(allowed[j], ctx + ".allowed_servers[" +
                                            std::to_string(j) + "]"));
        }
        t.allowed_servers = std::move(ids);
      } else {
        throw ParseError(ctx + ".allowed_servers: expected a list or \"any\"");
      }
    }
    types.push_back(std::move(t));
  }
  return VnfCatalog(std::move(types), topology);
}

inline VnfCatalog LoadCatalog(std::string_view text, const Topology& topology) {
  return CatalogFromJson(detail::ParseJsonText(text, "catalog"), topology);
}

inline Json CatalogToJson(const VnfCatalog& catalog) {
  Json out = Json::array();
  for (const VnfType& t : catalog.types()) {
    Json allowed = t.allowed_servers ? Json(*t.allowed_servers) : Json("any");
    out.push_back({{"id", t.id},
                   {"deploy_cost", t.deploy_cost},
                   {"requirements", t.requirements},
                   {"capacity_mbps", t.capacity_mbps},
                   {"proc_delay_ms", t.proc_delay_ms},
                   {"allowed_servers", allowed}});
  }
  return out;
}

inline constexpr std::string_view kTrafficHeader =
    "id,arrival_batch,ingress,egress,chain,bandwidth_mbps,delay_budget_ms,"
    "penalty_rate";

// Parses a traffic CSV. Requests are validated against the topology and
// catalog; errors name the offending line.
inline std::vector<TrafficRequest> LoadTraffic(std::string_view text,
                                               const Topology& topology,
                                               const VnfCatalog& catalog) {
  std::vector<TrafficRequest> out;
  std::vector<std::string> lines = Split(text, '\n');
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = Trim(lines[i]);
    std::string where = "traffic line " + std::to_string(i + 1);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kTrafficHeader) {
        throw ParseError(where + ": expected header '" +
                         std::string(kTrafficHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> cols = Split(line, ',');
    if (cols.size() != 8) {
      throw ParseError(where + ": expected 8 columns, got " +
                       std::to_string(cols.size()));
    }
    for (std::string& c : cols) c = std::string(Trim(c));
    TrafficRequest t;
    t.id = cols[0];
    auto batch = ParseInt(cols[1]);
    auto bw = ParseDouble(cols[5]);
    auto budget = ParseDouble(cols[6]);
    auto rate = ParseDouble(cols[7]);
    if (!batch) throw ParseError(where + ": bad arrival_batch '" + cols[1] + "'");
    if (!bw) throw ParseError(where + ": bad bandwidth_mbps '" + cols[5] + "'");
    if (!budget) {
      throw ParseError(where + ": bad delay_budget_ms '" + cols[6] + "'");
    }
    if (!rate) throw ParseError(where + ": bad penalty_rate '" + cols[7] + "'");
    t.arrival_batch = static_cast<int>(*batch);
    t.ingress = cols[2];
    t.egress = cols[3];
    if (!cols[4].empty()) t.chain = Split(cols[4], '|');
    t.bandwidth_mbps = *bw;
    t.delay_budget_ms = *budget;
    t.penalty.rate_dollars_per_ms = *rate;
    try {
      ValidateRequest(t, topology, catalog);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    out.push_back(std::move(t));
  }
  if (!header_seen) throw ParseError("traffic: missing header line");
  return out;
}

inline std::string TrafficToCsv(const std::vector<TrafficRequest>& requests) {
  std::string out(kTrafficHeader);
  out += "\n";
  for (const TrafficRequest& t : requests) {
    out += t.id + "," + std::to_string(t.arrival_batch) + "," + t.ingress + "," +
           t.egress + "," +
           Join(t.chain, '|', [](const std::string& s) { return s; }) + "," +
           FormatDouble(t.bandwidth_mbps) + "," +
           FormatDouble(t.delay_budget_ms) + "," +
           FormatDouble(t.penalty.rate_dollars_per_ms) + "\n";
  }
  return out;
}

}  // namespace vnfop
