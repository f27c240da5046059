#pragma once

// Command implementations behind the vnfop executable. Each returns the
// process exit code: 0 success, 2 some traffic could not be provisioned (or
// the exact search hit a limit), 1 error.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vnfop/augmented.hpp"
#include "vnfop/documents.hpp"
#include "vnfop/model_io.hpp"
#include "vnfop/simulator.hpp"

namespace vnfop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnprovisioned = 2;

struct Inputs {
  std::shared_ptr<const AugmentedNetwork> net;
  std::vector<TrafficRequest> traffic;
};

inline std::shared_ptr<const AugmentedNetwork> LoadNetwork(const RunConfig& c) {
  if (c.topology.empty()) throw Error("no topology file given");
  if (c.catalog.empty()) throw Error("no catalog file given");
  Topology topo = LoadTopology(ReadFile(c.topology));
  VnfCatalog cat = LoadCatalog(ReadFile(c.catalog), topo);
  return EnumerateVnfs(topo, cat);
}

inline Inputs LoadInputs(const RunConfig& c) {
  if (c.traffic.empty()) throw Error("no traffic file given");
  Inputs in{LoadNetwork(c), {}};
  in.traffic = LoadTraffic(ReadFile(c.traffic), in.net->topology(), in.net->catalog());
  return in;
}

inline SimulationOptions OptionsFor(const RunConfig& c, SolverMode mode) {
  return {mode, c.weights, c.heuristic, c.limits};
}

template <typename F>
int Guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

inline int Solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    ValidateConfig(config);
    if (config.mode == "both") throw Error("solve needs --mode exact or heuristic");
    const SolverMode mode = ParseSolverMode(config.mode);
    Inputs in = LoadInputs(config);
    Simulator sim(in.net, OptionsFor(config, mode));
    NetworkState state(in.net);
    std::vector<BatchOutcome> outcomes;
    bool complete = true;
    for (const TraceBatch& batch : GroupIntoBatches(in.traffic)) {
      BatchOutcome o = sim.Step(state, batch);
      for (const TrafficOutcome& t : o.traffics) {
        if (!t.provisioned) {
          complete = false;
          err << "traffic " << t.id << " not provisioned: " << t.reason << "\n";
        }
      }
      outcomes.push_back(std::move(o));
    }
    std::string doc = SerializeSolution(MakeSolution(*in.net, mode, outcomes));
    if (config.output.empty() || config.output == "-") {
      out << doc;
    } else {
      WriteFile(config.output, doc);
    }
    return complete ? kExitOk : kExitUnprovisioned;
  });
}

inline int Simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    ValidateConfig(config);
    if (config.output.empty()) throw Error("simulate needs an output directory");
    Inputs in = LoadInputs(config);
    Trace trace = GroupIntoBatches(in.traffic);
    std::filesystem::create_directories(config.output);
    std::vector<SolverMode> modes;
    if (config.mode != "exact") modes.push_back(SolverMode::kHeuristic);
    if (config.mode != "heuristic") modes.push_back(SolverMode::kExact);
    std::map<SolverMode, std::vector<MetricsRecord>> series;
    for (SolverMode mode : modes) {
      SimulationResult r = Run(trace, in.net, OptionsFor(config, mode));
      const std::string base = config.output + "/";
      const std::string name = ToString(mode);
      WriteFile(base + "metrics_" + name + ".csv", MetricsToCsv(r.records));
      WriteFile(base + "metrics_" + name + ".json", MetricsToJson(r.records).dump(2) + "\n");
      WriteFile(base + "timing_" + name + ".csv", TimingToCsv(r.records));
      int failed = 0;
      for (const MetricsRecord& rec : r.records) failed += rec.failed;
      out << name << ": " << r.records.size() << " batches, " << failed
          << " traffics not provisioned\n";
      series[mode] = std::move(r.records);
    }
    if (modes.size() == 2) {
      auto ratios = Compare(series[SolverMode::kHeuristic], series[SolverMode::kExact]);
      WriteFile(config.output + "/ratio.csv", RatiosToCsv(ratios));
    }
    return kExitOk;
  });
}

inline int CompareFiles(const std::string& a, const std::string& b,
                        const std::string& output, std::ostream& out,
                        std::ostream& err) {
  return Guarded(err, [&] {
    auto ratios = Compare(ParseMetricsCsv(ReadFile(a)), ParseMetricsCsv(ReadFile(b)));
    std::string csv = RatiosToCsv(ratios);
    if (output.empty() || output == "-") {
      out << csv;
    } else {
      WriteFile(output, csv);
    }
    return kExitOk;
  });
}

struct Summary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline Summary Summarize(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  Summary s{0.0, xs.front(), xs.front()};
  for (double x : xs) {
    s.mean += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean /= static_cast<double>(xs.size());
  return s;
}

inline void PrintCdf(std::ostream& out, const char* name, const std::vector<double>& cdf) {
  out << name << ":";
  if (cdf.empty()) out << " (none)";
  for (std::size_t k = 0; k < cdf.size(); ++k) {
    out << " " << k << "=" << FormatDouble(cdf[k]);
  }
  out << "\n";
}

inline void ReportMetrics(const std::vector<MetricsRecord>& records, std::ostream& out) {
  out << "records: " << records.size() << "\n";
  if (records.empty()) return;
  auto column = [&](auto get) {
    std::vector<double> xs;
    for (const MetricsRecord& r : records) xs.push_back(get(r));
    return Summarize(xs);
  };
  auto line = [&](const char* name, Summary s) {
    out << name << ": mean " << FormatDouble(s.mean) << ", min "
        << FormatDouble(s.min) << ", max " << FormatDouble(s.max) << "\n";
  };
  line("total", column([](const MetricsRecord& r) { return r.cost.total; }));
  line("deployment", column([](const MetricsRecord& r) { return r.cost.deployment; }));
  line("energy", column([](const MetricsRecord& r) { return r.cost.energy; }));
  line("forwarding", column([](const MetricsRecord& r) { return r.cost.forwarding; }));
  line("penalty", column([](const MetricsRecord& r) { return r.cost.penalty; }));
  line("fragmentation",
       column([](const MetricsRecord& r) { return r.cost.fragmentation; }));
  line("mean_utilization",
       column([](const MetricsRecord& r) { return r.mean_utilization; }));
  line("active_servers", column([](const MetricsRecord& r) {
         return static_cast<double>(r.active_servers);
       }));
  int provisioned = 0, failed = 0;
  std::vector<double> stretch;
  for (const MetricsRecord& r : records) {
    provisioned += r.provisioned;
    failed += r.failed;
    stretch.insert(stretch.end(), r.stretch.begin(), r.stretch.end());
  }
  out << "traffics: " << provisioned << " provisioned, " << failed << " failed\n";
  HopCdf cdf = ComputeHopCdf(records);
  PrintCdf(out, "ingress_hop_cdf", cdf.ingress);
  PrintCdf(out, "egress_hop_cdf", cdf.egress);
  if (stretch.empty()) {
    out << "stretch: (none)\n";
  } else {
    line("stretch", Summarize(stretch));
  }
}

inline void ReportRatios(const std::vector<RatioRecord>& ratios, std::ostream& out) {
  out << "ratio records: " << ratios.size() << "\n";
  if (ratios.empty()) return;
  auto line = [&](const char* name, auto get) {
    std::vector<double> xs;
    for (const RatioRecord& r : ratios) xs.push_back(get(r.ratio));
    Summary s = Summarize(xs);
    out << name << " ratio: mean " << FormatDouble(s.mean) << ", max "
        << FormatDouble(s.max) << "\n";
  };
  line("total", [](const CostBreakdown& c) { return c.total; });
  line("deployment", [](const CostBreakdown& c) { return c.deployment; });
  line("energy", [](const CostBreakdown& c) { return c.energy; });
  line("forwarding", [](const CostBreakdown& c) { return c.forwarding; });
  line("penalty", [](const CostBreakdown& c) { return c.penalty; });
  line("fragmentation", [](const CostBreakdown& c) { return c.fragmentation; });
}

// Accepts a metrics CSV, a metrics JSON or a ratio CSV.
inline int Report(const std::string& path, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    std::string text = ReadFile(path);
    const std::string head = text.substr(0, text.find('\n'));
    std::string_view first = Trim(head);
    if (first == kRatioHeader) {
      ReportRatios(ParseRatiosCsv(text), out);
    } else if (!first.empty() && first.front() == '{') {
      ReportMetrics(ParseMetricsJson(text), out);
    } else {
      ReportMetrics(ParseMetricsCsv(text), out);
    }
    return kExitOk;
  });
}

inline int GenTrace(const RunConfig& config, const TraceOptions& options,
                    std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    auto net = LoadNetwork(config);
    std::string csv =
        TrafficToCsv(GenerateTrace(net->topology(), net->catalog(), options));
    if (config.output.empty() || config.output == "-") {
      out << csv;
    } else {
      WriteFile(config.output, csv);
    }
    return kExitOk;
  });
}

// Diagnostic dump of the enumerated slots.
inline Json AugmentedToJson(const AugmentedNetwork& net) {
  Json slots = Json::array();
  const Topology& topo = net.topology();
  for (const PseudoVnf& s : net.slots()) {
    slots.push_back({{"id", s.id},
                     {"type", net.catalog().at(s.type).id},
                     {"server", topo.servers()[s.server].id},
                     {"switch", topo.switches()[s.switch_index]},
                     {"pseudo_switch", s.pseudo_switch}});
  }
  return {{"schema_version", kSchemaVersion},
          {"switches", topo.switch_count()},
          {"links", topo.link_count()},
          {"servers", topo.server_count()},
          {"slots", slots}};
}

inline int Augment(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    out << AugmentedToJson(*LoadNetwork(config)).dump(2) << "\n";
    return kExitOk;
  });
}

}  // namespace vnfop::cli
