#pragma once

// Output documents and the run configuration.
//
// Solution (JSON, schema_version 1):
//   {"schema_version": 1, "mode": "heuristic", "total": {cost},
//    "batches": [{"label", "status", "message", "cost": {cost},
//                 "traffics": [{"id", "status", "reason",
//                               "placements": [{"stage", "type", "switch", "slot"}],
//                               "routes": [[["u", "v"], ...], ...]}]}]}
//   where {cost} = {"deployment", "energy", "forwarding", "penalty",
//                   "fragmentation", "total"} and routes has one link list per
//   traffic edge.
// Metrics (CSV): see kMetricsHeader; hop and stretch columns hold
//   '|'-separated lists.
// Ratios (CSV): see kRatioHeader.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vnfop/cost.hpp"
#include "vnfop/exact.hpp"
#include "vnfop/format.hpp"
#include "vnfop/heuristic.hpp"
#include "vnfop/model_io.hpp"
#include "vnfop/simulator.hpp"

namespace vnfop {

inline constexpr int kSchemaVersion = 1;

inline Json CostToJson(const CostBreakdown& c) {
  return {{"deployment", c.deployment}, {"energy", c.energy},
          {"forwarding", c.forwarding}, {"penalty", c.penalty},
          {"fragmentation", c.fragmentation}, {"total", c.total}};
}

inline CostBreakdown CostFromJson(const Json& j, const std::string& ctx) {
  using detail::Field;
  using detail::Number;
  CostBreakdown c;
  c.deployment = Number(Field(j, "deployment", ctx), ctx + ".deployment");
  c.energy = Number(Field(j, "energy", ctx), ctx + ".energy");
  c.forwarding = Number(Field(j, "forwarding", ctx), ctx + ".forwarding");
  c.penalty = Number(Field(j, "penalty", ctx), ctx + ".penalty");
  c.fragmentation = Number(Field(j, "fragmentation", ctx), ctx + ".fragmentation");
  c.total = Number(Field(j, "total", ctx), ctx + ".total");
  return c;
}

struct SolutionPlacement {
  int stage = 0;  // 1-based chain position
  std::string type;
  std::string switch_id;
  std::string slot;

  bool operator==(const SolutionPlacement&) const = default;
};

struct SolutionTraffic {
  std::string id;
  bool provisioned = false;
  std::string reason;
  std::vector<SolutionPlacement> placements;
  std::vector<std::vector<std::pair<std::string, std::string>>> routes;

  bool operator==(const SolutionTraffic&) const = default;
};

struct SolutionBatch {
  long long label = 0;
  std::string status;
  std::string message;
  CostBreakdown cost;
  std::vector<SolutionTraffic> traffics;

  bool operator==(const SolutionBatch&) const = default;
};

struct SolutionDocument {
  std::string mode;
  CostBreakdown total;
  std::vector<SolutionBatch> batches;

  bool operator==(const SolutionDocument&) const = default;
};

inline CostBreakdown Accumulate(CostBreakdown a, const CostBreakdown& b) {
  a.deployment += b.deployment;
  a.energy += b.energy;
  a.forwarding += b.forwarding;
  a.penalty += b.penalty;
  a.fragmentation += b.fragmentation;
  a.total += b.total;
  return a;
}

inline SolutionDocument MakeSolution(const AugmentedNetwork& net, SolverMode mode,
                                     std::span<const BatchOutcome> batches) {
  SolutionDocument doc;
  doc.mode = ToString(mode);
  const Topology& topo = net.topology();
  for (const BatchOutcome& b : batches) {
    SolutionBatch sb{b.label, b.status, b.message, b.cost, {}};
    doc.total = Accumulate(doc.total, b.cost);
    for (const TrafficOutcome& t : b.traffics) {
      SolutionTraffic st{t.id, t.provisioned, t.reason, {}, {}};
      if (t.provisioned) {
        const TrafficPlacement& p = t.placement;
        for (std::size_t i = 0; i < p.slots.size(); ++i) {
          const PseudoVnf& s = net.slot(p.slots[i]);
          st.placements.push_back({static_cast<int>(i + 1),
                                   net.catalog().at(s.type).id,
                                   topo.switches()[s.switch_index], s.id});
        }
        for (const Route& r : p.routes) {
          auto& links = st.routes.emplace_back();
          for (const DirectedLink& hop : r) {
            links.emplace_back(topo.switches()[hop.from], topo.switches()[hop.to]);
          }
        }
      }
      sb.traffics.push_back(std::move(st));
    }
    doc.batches.push_back(std::move(sb));
  }
  return doc;
}

inline Json SolutionToJson(const SolutionDocument& doc) {
  Json batches = Json::array();
  for (const SolutionBatch& b : doc.batches) {
    Json traffics = Json::array();
    for (const SolutionTraffic& t : b.traffics) {
      Json placements = Json::array();
      for (const SolutionPlacement& p : t.placements) {
        placements.push_back({{"stage", p.stage},
                              {"type", p.type},
                              {"switch", p.switch_id},
                              {"slot", p.slot}});
      }
      Json routes = Json::array();
      for (const auto& r : t.routes) {
        Json links = Json::array();
        for (const auto& [u, v] : r) links.push_back({u, v});
        routes.push_back(links);
      }
      traffics.push_back({{"id", t.id},
                          {"status", t.provisioned ? "provisioned" : "failed"},
                          {"reason", t.reason},
                          {"placements", placements},
                          {"routes", routes}});
    }
    batches.push_back({{"label", b.label},
                       {"status", b.status},
                       {"message", b.message},
                       {"cost", CostToJson(b.cost)},
                       {"traffics", traffics}});
  }
  return {{"schema_version", kSchemaVersion},
          {"mode", doc.mode},
          {"total", CostToJson(doc.total)},
          {"batches", batches}};
}

inline std::string SerializeSolution(const SolutionDocument& doc) {
  return SolutionToJson(doc).dump(2) + "\n";
}

inline void CheckSchemaVersion(const Json& doc, const std::string& what) {
  const Json& v = detail::Field(doc, "schema_version", what);
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
    throw ParseError(what + ": unsupported schema_version " + v.dump());
  }
}

inline SolutionDocument ParseSolution(std::string_view text) {
  using namespace detail;
  Json j = ParseJsonText(text, "solution");
  CheckSchemaVersion(j, "solution");
  SolutionDocument doc;
  doc.mode = String(Field(j, "mode", "solution"), "solution.mode");
  doc.total = CostFromJson(Field(j, "total", "solution"), "solution.total");
  const Json& batches = Array(Field(j, "batches", "solution"), "solution.batches");
  for (std::size_t b = 0; b < batches.size(); ++b) {
    std::string bctx = "batches[" + std::to_string(b) + "]";
    const Json& jb = batches[b];
    SolutionBatch sb;
    const Json& label = Field(jb, "label", bctx);
    if (!label.is_number_integer()) throw ParseError(bctx + ".label: expected an integer");
    sb.label = label.get<long long>();
    sb.status = String(Field(jb, "status", bctx), bctx + ".status");
    sb.message = String(Field(jb, "message", bctx), bctx + ".message");
    sb.cost = CostFromJson(Field(jb, "cost", bctx), bctx + ".cost");
    const Json& traffics = Array(Field(jb, "traffics", bctx), bctx + ".traffics");
    for (std::size_t t = 0; t < traffics.size(); ++t) {
      std::string tctx = bctx + ".traffics[" + std::to_string(t) + "]";
      const Json& jt = traffics[t];
      SolutionTraffic st;
      st.id = String(Field(jt, "id", tctx), tctx + ".id");
      std::string status = String(Field(jt, "status", tctx), tctx + ".status");
      if (status != "provisioned" && status != "failed") {
        throw ParseError(tctx + ".status: unknown value '" + status + "'");
      }
      st.provisioned = status == "provisioned";
      st.reason = String(Field(jt, "reason", tctx), tctx + ".reason");
      const Json& ps = Array(Field(jt, "placements", tctx), tctx + ".placements");
      for (std::size_t i = 0; i < ps.size(); ++i) {
        std::string pctx = tctx + ".placements[" + std::to_string(i) + "]";
        const Json& stage = Field(ps[i], "stage", pctx);
        if (!stage.is_number_integer()) {
          throw ParseError(pctx + ".stage: expected an integer");
        }
        st.placements.push_back({stage.get<int>(),
                                 String(Field(ps[i], "type", pctx), pctx + ".type"),
                                 String(Field(ps[i], "switch", pctx), pctx + ".switch"),
                                 String(Field(ps[i], "slot", pctx), pctx + ".slot")});
      }
      const Json& rs = Array(Field(jt, "routes", tctx), tctx + ".routes");
      for (std::size_t e = 0; e < rs.size(); ++e) {
        std::string rctx = tctx + ".routes[" + std::to_string(e) + "]";
        auto& links = st.routes.emplace_back();
        for (const Json& l : Array(rs[e], rctx)) {
          if (!l.is_array() || l.size() != 2) {
            throw ParseError(rctx + ": each link must be a [u, v] pair");
          }
          links.emplace_back(String(l[0], rctx), String(l[1], rctx));
        }
      }
      sb.traffics.push_back(std::move(st));
    }
    doc.batches.push_back(std::move(sb));
  }
  return doc;
}

// ---- metrics CSV ----

inline constexpr std::string_view kMetricsHeader =
    "schema_version,label,status,provisioned,failed,deployment,energy,forwarding,"
    "penalty,fragmentation,total,mean_utilization,active_servers,ingress_hops,"
    "egress_hops,stretch";

inline constexpr std::string_view kRatioHeader =
    "schema_version,label,deployment,energy,forwarding,penalty,fragmentation,total";

inline constexpr std::string_view kTimingHeader = "label,wall_time_s";

inline std::string MetricsToCsv(std::span<const MetricsRecord> records) {
  std::string out(kMetricsHeader);
  out += "\n";
  auto ints = [](const std::vector<int>& v) {
    return Join(v, '|', [](int x) { return std::to_string(x); });
  };
  for (const MetricsRecord& r : records) {
    const CostBreakdown& c = r.cost;
    out += std::to_string(kSchemaVersion) + "," + std::to_string(r.label) + "," +
           r.status + "," + std::to_string(r.provisioned) + "," +
           std::to_string(r.failed) + "," + FormatDouble(c.deployment) + "," +
           FormatDouble(c.energy) + "," + FormatDouble(c.forwarding) + "," +
           FormatDouble(c.penalty) + "," + FormatDouble(c.fragmentation) + "," +
           FormatDouble(c.total) + "," + FormatDouble(r.mean_utilization) + "," +
           std::to_string(r.active_servers) + "," + ints(r.ingress_hops) + "," +
           ints(r.egress_hops) + "," +
           Join(r.stretch, '|', [](double x) { return FormatDouble(x); }) + "\n";
  }
  return out;
}

inline std::string TimingToCsv(std::span<const MetricsRecord> records) {
  std::string out(kTimingHeader);
  out += "\n";
  for (const MetricsRecord& r : records) {
    out += std::to_string(r.label) + "," + FormatDouble(r.wall_time_s) + "\n";
  }
  return out;
}

namespace detail {

// Data rows of a CSV document with the expected header; blank lines are
// skipped. Each row is returned with its 1-based line number.
inline std::vector<std::pair<int, std::vector<std::string>>> CsvRows(
    std::string_view text, std::string_view header, std::string_view what) {
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  std::vector<std::string> lines = Split(text, '\n');
  bool header_seen = false;
  const std::size_t columns = Split(header, ',').size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = Trim(lines[i]);
    if (line.empty()) continue;
    const int row = static_cast<int>(i + 1);
    if (!header_seen) {
      if (line != header) {
        throw ParseError(std::string(what) + " row " + std::to_string(row) +
                         ": unexpected header");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> cols = Split(line, ',');
    if (cols.size() != columns) {
      throw ParseError(std::string(what) + " row " + std::to_string(row) +
                       ": expected " + std::to_string(columns) + " columns, got " +
                       std::to_string(cols.size()));
    }
    rows.emplace_back(row, std::move(cols));
  }
  if (!header_seen) throw ParseError(std::string(what) + ": missing header");
  return rows;
}

class RowReader {
 public:
  RowReader(std::string what, int row, const std::vector<std::string>& cols,
            std::string_view header)
      : where_(std::move(what) + " row " + std::to_string(row)),
        cols_(cols),
        names_(Split(header, ',')) {}

  double Number(int i) const {
    auto v = ParseDouble(cols_[i]);
    if (!v) Fail(i);
    return *v;
  }
  long long Integer(int i) const {
    auto v = ParseInt(cols_[i]);
    if (!v) Fail(i);
    return *v;
  }
  const std::string& Text(int i) const { return cols_[i]; }
  std::vector<int> Ints(int i) const {
    std::vector<int> out;
    if (cols_[i].empty()) return out;
    for (const std::string& part : Split(cols_[i], '|')) {
      auto v = ParseInt(part);
      if (!v) Fail(i);
      out.push_back(static_cast<int>(*v));
    }
    return out;
  }
  std::vector<double> Numbers(int i) const {
    std::vector<double> out;
    if (cols_[i].empty()) return out;
    for (const std::string& part : Split(cols_[i], '|')) {
      auto v = ParseDouble(part);
      if (!v) Fail(i);
      out.push_back(*v);
    }
    return out;
  }
  void CheckVersion() const {
    if (Integer(0) != kSchemaVersion) {
      throw ParseError(where_ + ": unsupported schema_version " + cols_[0]);
    }
  }

 private:
  [[noreturn]] void Fail(int i) const {
    throw ParseError(where_ + ": bad " + names_[i] + " '" + cols_[i] + "'");
  }

  std::string where_;
  const std::vector<std::string>& cols_;
  std::vector<std::string> names_;
};

}  // namespace detail

inline std::vector<MetricsRecord> ParseMetricsCsv(std::string_view text) {
  std::vector<MetricsRecord> out;
  for (const auto& [row, cols] : detail::CsvRows(text, kMetricsHeader, "metrics")) {
    detail::RowReader r("metrics", row, cols, kMetricsHeader);
    r.CheckVersion();
    MetricsRecord m;
    m.label = r.Integer(1);
    m.status = r.Text(2);
    m.provisioned = static_cast<int>(r.Integer(3));
    m.failed = static_cast<int>(r.Integer(4));
    m.cost = {r.Number(5), r.Number(6), r.Number(7),
              r.Number(8), r.Number(9), r.Number(10)};
    m.mean_utilization = r.Number(11);
    m.active_servers = static_cast<int>(r.Integer(12));
    m.ingress_hops = r.Ints(13);
    m.egress_hops = r.Ints(14);
    m.stretch = r.Numbers(15);
    out.push_back(std::move(m));
  }
  return out;
}

inline Json MetricsToJson(std::span<const MetricsRecord> records) {
  Json rows = Json::array();
  for (const MetricsRecord& r : records) {
    rows.push_back({{"label", r.label},
                    {"status", r.status},
                    {"provisioned", r.provisioned},
                    {"failed", r.failed},
                    {"cost", CostToJson(r.cost)},
                    {"mean_utilization", r.mean_utilization},
                    {"active_servers", r.active_servers},
                    {"ingress_hops", r.ingress_hops},
                    {"egress_hops", r.egress_hops},
                    {"stretch", r.stretch}});
  }
  return {{"schema_version", kSchemaVersion}, {"records", rows}};
}

inline std::vector<MetricsRecord> ParseMetricsJson(std::string_view text) {
  using namespace detail;
  Json j = ParseJsonText(text, "metrics");
  CheckSchemaVersion(j, "metrics");
  std::vector<MetricsRecord> out;
  const Json& rows = Array(Field(j, "records", "metrics"), "metrics.records");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string ctx = "records[" + std::to_string(i) + "]";
    const Json& r = rows[i];
    auto integer = [&](const char* key) {
      const Json& v = Field(r, key, ctx);
      if (!v.is_number_integer()) {
        throw ParseError(ctx + "." + key + ": expected an integer");
      }
      return v.get<long long>();
    };
    MetricsRecord m;
    m.label = integer("label");
    m.status = String(Field(r, "status", ctx), ctx + ".status");
    m.provisioned = static_cast<int>(integer("provisioned"));
    m.failed = static_cast<int>(integer("failed"));
    m.cost = CostFromJson(Field(r, "cost", ctx), ctx + ".cost");
    m.mean_utilization =
        Number(Field(r, "mean_utilization", ctx), ctx + ".mean_utilization");
    m.active_servers = static_cast<int>(integer("active_servers"));
    for (const Json& h : Array(Field(r, "ingress_hops", ctx), ctx + ".ingress_hops")) {
      m.ingress_hops.push_back(h.get<int>());
    }
    for (const Json& h : Array(Field(r, "egress_hops", ctx), ctx + ".egress_hops")) {
      m.egress_hops.push_back(h.get<int>());
    }
    for (const Json& s : Array(Field(r, "stretch", ctx), ctx + ".stretch")) {
      m.stretch.push_back(Number(s, ctx + ".stretch"));
    }
    out.push_back(std::move(m));
  }
  return out;
}

inline std::string RatiosToCsv(std::span<const RatioRecord> ratios) {
  std::string out(kRatioHeader);
  out += "\n";
  for (const RatioRecord& r : ratios) {
    const CostBreakdown& c = r.ratio;
    out += std::to_string(kSchemaVersion) + "," + std::to_string(r.label) + "," +
           FormatDouble(c.deployment) + "," + FormatDouble(c.energy) + "," +
           FormatDouble(c.forwarding) + "," + FormatDouble(c.penalty) + "," +
           FormatDouble(c.fragmentation) + "," + FormatDouble(c.total) + "\n";
  }
  return out;
}

inline std::vector<RatioRecord> ParseRatiosCsv(std::string_view text) {
  std::vector<RatioRecord> out;
  for (const auto& [row, cols] : detail::CsvRows(text, kRatioHeader, "ratio")) {
    detail::RowReader r("ratio", row, cols, kRatioHeader);
    r.CheckVersion();
    out.push_back({r.Integer(1),
                   {r.Number(2), r.Number(3), r.Number(4), r.Number(5), r.Number(6),
                    r.Number(7)}});
  }
  return out;
}

// ---- run configuration ----

struct RunConfig {
  std::string topology;
  std::string catalog;
  std::string traffic;  // traffic CSV for solve, trace CSV for simulate
  std::string mode = "heuristic";  // exact, heuristic or both
  CostWeights weights;
  HeuristicOptions heuristic;
  ExactLimits limits;
  std::uint64_t seed = 1;
  std::string output;  // solution file, or output directory for simulate
};

inline IdleEnergyMode ParseIdleMode(std::string_view s) {
  if (s == "per-slot") return IdleEnergyMode::kPerSlot;
  if (s == "per-server") return IdleEnergyMode::kPerServer;
  throw Error("unknown idle mode '" + std::string(s) +
              "' (expected per-slot or per-server)");
}

inline const char* ToString(IdleEnergyMode m) {
  return m == IdleEnergyMode::kPerSlot ? "per-slot" : "per-server";
}

// Fields present in `text` override those already in `config`.
inline void ApplyConfigJson(std::string_view text, RunConfig& config) {
  using namespace detail;
  Json j = ParseJsonText(text, "config");
  if (!j.is_object()) throw ParseError("config: expected an object");
  auto str = [&](const Json& obj, const char* key, std::string& out,
                 const std::string& ctx) {
    if (obj.contains(key)) out = String(obj[key], ctx + "." + key);
  };
  auto num = [&](const Json& obj, const char* key, double& out,
                 const std::string& ctx) {
    if (obj.contains(key)) out = Number(obj[key], ctx + "." + key);
  };
  str(j, "topology", config.topology, "config");
  str(j, "catalog", config.catalog, "config");
  str(j, "traffic", config.traffic, "config");
  str(j, "mode", config.mode, "config");
  str(j, "output", config.output, "config");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) {
      throw ParseError("config.seed: expected a nonnegative integer");
    }
    config.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("weights")) {
    const Json& w = j["weights"];
    const std::string ctx = "config.weights";
    if (!w.is_object()) throw ParseError(ctx + ": expected an object");
    CostWeights& cw = config.weights;
    num(w, "alpha", cw.alpha, ctx);
    num(w, "beta", cw.beta, ctx);
    num(w, "gamma", cw.gamma, ctx);
    num(w, "lambda", cw.lambda, ctx);
    num(w, "mu", cw.mu, ctx);
    num(w, "sigma", cw.sigma, ctx);
    num(w, "bandwidth_price", cw.bandwidth_price, ctx);
    num(w, "dollars_per_watt", cw.dollars_per_watt, ctx);
    if (w.contains("resource_price")) {
      cw.resource_price = AmountMap(w["resource_price"], ctx + ".resource_price");
    }
    if (w.contains("idle_mode")) {
      cw.idle_mode = ParseIdleMode(String(w["idle_mode"], ctx + ".idle_mode"));
    }
  }
  if (j.contains("heuristic")) {
    const Json& h = j["heuristic"];
    if (h.contains("k_paths")) {
      if (!h["k_paths"].is_number_integer()) {
        throw ParseError("config.heuristic.k_paths: expected an integer");
      }
      config.heuristic.k_paths = h["k_paths"].get<int>();
    }
  }
  if (j.contains("exact")) {
    const Json& e = j["exact"];
    const std::string ctx = "config.exact";
    auto integer = [&](const char* key) -> long long {
      if (!e[key].is_number_integer()) {
        throw ParseError(ctx + "." + key + ": expected an integer");
      }
      return e[key].get<long long>();
    };
    if (e.contains("hop_bound")) config.limits.hop_bound = static_cast<int>(integer("hop_bound"));
    if (e.contains("max_nodes")) config.limits.max_nodes = integer("max_nodes");
    if (e.contains("max_routes")) config.limits.max_routes = integer("max_routes");
    num(e, "time_budget_s", config.limits.time_budget_s, ctx);
  }
}

inline void ValidateConfig(const RunConfig& c) {
  if (c.mode != "exact" && c.mode != "heuristic" && c.mode != "both") {
    throw ValidationError("mode must be exact, heuristic or both (got '" + c.mode +
                          "')");
  }
  c.weights.Validate();
  if (c.heuristic.k_paths < 1) throw ValidationError("k_paths must be >= 1");
  if (c.limits.hop_bound < 0) throw ValidationError("hop_bound must be >= 0");
  if (!(c.limits.time_budget_s > 0)) {
    throw ValidationError("time budget must be positive");
  }
}

}  // namespace vnfop
