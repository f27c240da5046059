#pragma once

// Trace replay: batches are provisioned in label order against one evolving
// network state, and each batch yields a metrics record.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vnfop/exact.hpp"
#include "vnfop/heuristic.hpp"
#include "vnfop/paths.hpp"
#include "vnfop/state.hpp"

namespace vnfop {

enum class SolverMode { kExact, kHeuristic };

inline const char* ToString(SolverMode m) {
  return m == SolverMode::kExact ? "exact" : "heuristic";
}

inline SolverMode ParseSolverMode(std::string_view s) {
  if (s == "exact") return SolverMode::kExact;
  if (s == "heuristic") return SolverMode::kHeuristic;
  throw Error("unknown mode '" + std::string(s) + "' (expected exact or heuristic)");
}

struct TraceBatch {
  long long label = 0;
  std::vector<TrafficRequest> requests;
};

using Trace = std::vector<TraceBatch>;

// Groups requests by arrival batch, in increasing label order. Request order
// inside a batch is preserved.
inline Trace GroupIntoBatches(std::span<const TrafficRequest> requests) {
  std::map<long long, std::vector<TrafficRequest>> grouped;
  for (const TrafficRequest& t : requests) grouped[t.arrival_batch].push_back(t);
  Trace trace;
  for (auto& [label, reqs] : grouped) trace.push_back({label, std::move(reqs)});
  return trace;
}

inline void ValidateTrace(const Trace& trace, const AugmentedNetwork& net) {
  for (std::size_t b = 0; b < trace.size(); ++b) {
    if (b > 0 && trace[b].label <= trace[b - 1].label) {
      throw ValidationError("trace batch labels must be strictly increasing (" +
                            std::to_string(trace[b - 1].label) + " then " +
                            std::to_string(trace[b].label) + ")");
    }
    for (const TrafficRequest& t : trace[b].requests) {
      ValidateRequest(t, net.topology(), net.catalog());
    }
  }
}

struct TrafficOutcome {
  std::string id;
  bool provisioned = false;
  std::string reason;
  TrafficPlacement placement;  // meaningful only when provisioned
};

struct BatchOutcome {
  long long label = 0;
  std::string status;  // "ok", "partial", "infeasible" or "limit_exceeded"
  std::string message;
  CostBreakdown cost;
  std::vector<TrafficOutcome> traffics;
};

struct MetricsRecord {
  long long label = 0;
  std::string status;
  int provisioned = 0;
  int failed = 0;
  CostBreakdown cost;
  double mean_utilization = 0.0;
  int active_servers = 0;
  // One entry per placed chain element, in traffic then chain order:
  // shortest-path hops from the traffic's ingress / to its egress.
  std::vector<int> ingress_hops;
  std::vector<int> egress_hops;
  // One entry per provisioned traffic.
  std::vector<double> stretch;
  double wall_time_s = 0.0;  // solver call only; excluded from equality

  bool operator==(const MetricsRecord& o) const {
    return label == o.label && status == o.status && provisioned == o.provisioned &&
           failed == o.failed && cost == o.cost &&
           mean_utilization == o.mean_utilization &&
           active_servers == o.active_servers && ingress_hops == o.ingress_hops &&
           egress_hops == o.egress_hops && stretch == o.stretch;
  }
};

struct SimulationOptions {
  SolverMode mode = SolverMode::kHeuristic;
  CostWeights weights;
  HeuristicOptions heuristic;
  ExactLimits limits;
};

struct SimulationResult {
  std::vector<MetricsRecord> records;
  std::vector<BatchOutcome> batches;
  NetworkState final_state;
};

// Provisioned hops over the fewest possible hops between ingress and egress.
// A traffic that never leaves its switch has stretch 1.
inline double PathStretch(const TrafficPlacement& p, const AugmentedNetwork& net,
                          const PathTable& paths) {
  int provisioned = p.Hops();
  if (provisioned == 0) return 1.0;
  const Topology& topo = net.topology();
  int shortest = paths.Hops(topo.SwitchIndex(p.request.ingress),
                            topo.SwitchIndex(p.request.egress));
  return static_cast<double>(provisioned) / std::max(1, shortest);
}

// Mean over active servers of the used fraction of CPU cores (or of all
// resource kinds averaged, when cores are not modelled).
inline double MeanUtilization(const NetworkState& state) {
  const AugmentedNetwork& net = state.network();
  const Topology& topo = net.topology();
  auto cpu = topo.FindKind(kCpuCores);
  double sum = 0.0;
  int active = 0;
  for (int n = 0; n < topo.server_count(); ++n) {
    if (!state.ledger().server_active(n)) continue;
    ++active;
    if (cpu) {
      sum += state.ledger().server_used(n, *cpu) / topo.Capacity(n, *cpu);
      continue;
    }
    double part = 0.0;
    int kinds = 0;
    for (int k = 0; k < net.kind_count(); ++k) {
      if (topo.Capacity(n, k) <= 0.0) continue;
      part += state.ledger().server_used(n, k) / topo.Capacity(n, k);
      ++kinds;
    }
    sum += kinds ? part / kinds : 0.0;
  }
  return active ? sum / active : 0.0;
}

class Simulator {
 public:
  Simulator(std::shared_ptr<const AugmentedNetwork> net, SimulationOptions options)
      : net_(std::move(net)),
        options_(std::move(options)),
        paths_(net_->topology()),
        heuristic_(net_, options_.weights, options_.heuristic) {}

  // Provisions one batch on `state` and describes the outcome.
  BatchOutcome Step(NetworkState& state, const TraceBatch& batch,
                    double* wall_time_s = nullptr) const {
    BatchOutcome out;
    out.label = batch.label;
    auto start = std::chrono::steady_clock::now();
    if (options_.mode == SolverMode::kHeuristic) {
      BatchResult r = heuristic_.ProvisionBatch(state, batch.requests);
      Stop(start, wall_time_s);
      out.cost = r.cost;
      for (std::size_t i = 0; i < r.traffics.size(); ++i) {
        const TrafficResult& tr = r.traffics[i];
        out.traffics.push_back(
            {batch.requests[i].id, tr.provisioned, tr.reason, tr.placement});
      }
      out.status = r.failed == 0 ? "ok" : (r.provisioned == 0 ? "infeasible" : "partial");
    } else {
      ExactResult r = SolveExact(state, batch.requests, options_.weights,
                                 options_.limits);
      Stop(start, wall_time_s);
      if (r.status == SolveStatus::kOptimal) {
        state = r.state;
        out.cost = r.cost;
        out.status = "ok";
        for (const TrafficPlacement& p : r.assignment) {
          out.traffics.push_back({p.request.id, true, "", p});
        }
      } else {
        out.status = ToString(r.status);
        out.message = r.message;
        for (const TrafficRequest& t : batch.requests) {
          out.traffics.push_back({t.id, false, r.message, {}});
        }
      }
    }
    if (batch.requests.empty()) out.status = "ok";
    return out;
  }

  MetricsRecord Measure(const NetworkState& state, const BatchOutcome& outcome,
                        double wall_time_s) const {
    MetricsRecord rec;
    rec.label = outcome.label;
    rec.status = outcome.status;
    rec.cost = outcome.cost;
    rec.mean_utilization = MeanUtilization(state);
    rec.active_servers = state.ActiveServerCount();
    rec.wall_time_s = wall_time_s;
    const Topology& topo = net_->topology();
    for (const TrafficOutcome& t : outcome.traffics) {
      if (!t.provisioned) {
        ++rec.failed;
        continue;
      }
      ++rec.provisioned;
      int in = topo.SwitchIndex(t.placement.request.ingress);
      int eg = topo.SwitchIndex(t.placement.request.egress);
      for (int m : t.placement.slots) {
        int sw = net_->slot(m).switch_index;
        rec.ingress_hops.push_back(paths_.Hops(in, sw));
        rec.egress_hops.push_back(paths_.Hops(sw, eg));
      }
      rec.stretch.push_back(PathStretch(t.placement, *net_, paths_));
    }
    return rec;
  }

  SimulationResult Run(const Trace& trace) const {
    ValidateTrace(trace, *net_);
    SimulationResult result{{}, {}, NetworkState(net_)};
    for (const TraceBatch& batch : trace) {
      double wall = 0.0;
      BatchOutcome outcome = Step(result.final_state, batch, &wall);
      result.records.push_back(Measure(result.final_state, outcome, wall));
      result.batches.push_back(std::move(outcome));
    }
    return result;
  }

 private:
  static void Stop(std::chrono::steady_clock::time_point start, double* out) {
    if (!out) return;
    *out = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
               .count();
  }

  std::shared_ptr<const AugmentedNetwork> net_;
  SimulationOptions options_;
  PathTable paths_;
  HeuristicSolver heuristic_;
};

inline SimulationResult Run(const Trace& trace,
                            std::shared_ptr<const AugmentedNetwork> net,
                            const SimulationOptions& options) {
  return Simulator(std::move(net), options).Run(trace);
}

struct RatioRecord {
  long long label = 0;
  CostBreakdown ratio;

  bool operator==(const RatioRecord&) const = default;
};

// a / b, where 0 / 0 is 1 and x / 0 is infinite.
inline double SafeRatio(double a, double b) {
  if (b == 0.0) return a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return a / b;
}

inline std::vector<RatioRecord> Compare(std::span<const MetricsRecord> a,
                                        std::span<const MetricsRecord> b) {
  if (a.size() != b.size()) {
    throw Error("compare: series lengths differ (" + std::to_string(a.size()) +
                " vs " + std::to_string(b.size()) + ")");
  }
  std::vector<RatioRecord> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].label != b[i].label) {
      throw Error("compare: label mismatch at row " + std::to_string(i + 1) + " (" +
                  std::to_string(a[i].label) + " vs " + std::to_string(b[i].label) +
                  ")");
    }
    const CostBreakdown& x = a[i].cost;
    const CostBreakdown& y = b[i].cost;
    out.push_back({a[i].label,
                   {SafeRatio(x.deployment, y.deployment), SafeRatio(x.energy, y.energy),
                    SafeRatio(x.forwarding, y.forwarding),
                    SafeRatio(x.penalty, y.penalty),
                    SafeRatio(x.fragmentation, y.fragmentation),
                    SafeRatio(x.total, y.total)}});
  }
  return out;
}

// cdf[k] is the fraction of placed functions within k hops.
struct HopCdf {
  std::vector<double> ingress;
  std::vector<double> egress;
};

inline std::vector<double> Cumulative(const std::vector<int>& hops) {
  if (hops.empty()) return {};
  int max = *std::max_element(hops.begin(), hops.end());
  std::vector<double> cdf(max + 1, 0.0);
  for (int h : hops) cdf[h] += 1.0;
  double run = 0.0;
  for (double& c : cdf) {
    run += c;
    c = run / static_cast<double>(hops.size());
  }
  return cdf;
}

inline HopCdf ComputeHopCdf(std::span<const MetricsRecord> records) {
  if (records.empty()) throw Error("hop_cdf: no records");
  std::vector<int> in, eg;
  for (const MetricsRecord& r : records) {
    in.insert(in.end(), r.ingress_hops.begin(), r.ingress_hops.end());
    eg.insert(eg.end(), r.egress_hops.begin(), r.egress_hops.end());
  }
  return {Cumulative(in), Cumulative(eg)};
}

struct TraceOptions {
  std::uint64_t seed = 1;
  int batches = 10;
  double mean_requests = 4.0;
  double amplitude = 0.5;  // relative swing of the daily volume curve
  int period = 24;         // batches per cycle
  int min_chain = 1, max_chain = 3;
  double min_bandwidth = 50.0, max_bandwidth = 300.0;
  double delay_budget_ms = 100.0;
  double penalty_rate = 1.0;
};

// Seeded synthetic trace whose per-batch volume follows a sinusoid.
inline std::vector<TrafficRequest> GenerateTrace(const Topology& topo,
                                                 const VnfCatalog& catalog,
                                                 const TraceOptions& o) {
  if (topo.switch_count() == 0) throw Error("gen-trace: topology has no switches");
  if (catalog.size() == 0 && o.max_chain > 0) {
    throw Error("gen-trace: catalog is empty");
  }
  if (o.min_chain < 0 || o.max_chain < o.min_chain || o.batches < 0 ||
      o.period <= 0 || o.min_bandwidth <= 0 || o.max_bandwidth < o.min_bandwidth) {
    throw ValidationError("gen-trace: inconsistent options");
  }
  std::mt19937_64 rng(o.seed);
  auto uniform = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  std::vector<TrafficRequest> out;
  int next = 0;
  for (int b = 0; b < o.batches; ++b) {
    double volume = o.mean_requests *
                    (1.0 + o.amplitude * std::sin(2.0 * std::numbers::pi * b / o.period));
    int count = std::max(0, static_cast<int>(std::lround(volume)));
    for (int i = 0; i < count; ++i) {
      TrafficRequest t;
      t.id = "r" + std::to_string(next++);
      t.arrival_batch = b;
      t.ingress = topo.switches()[uniform(0, topo.switch_count() - 1)];
      t.egress = topo.switches()[uniform(0, topo.switch_count() - 1)];
      int len = catalog.size() == 0 ? 0 : uniform(o.min_chain, o.max_chain);
      for (int k = 0; k < len; ++k) {
        t.chain.push_back(catalog.at(uniform(0, catalog.size() - 1)).id);
      }
      // Whole megabits keep the CSV exact.
      t.bandwidth_mbps = std::max(
          1.0, std::round(std::uniform_real_distribution<double>(
                   o.min_bandwidth, o.max_bandwidth)(rng)));
      t.delay_budget_ms = o.delay_budget_ms;
      t.penalty.rate_dollars_per_ms = o.penalty_rate;
      out.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace vnfop
