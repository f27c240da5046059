#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vnfop/cli.hpp"

namespace {

// Flag values; unset flags leave the config file (or default) untouched.
struct Overrides {
  std::string config;
  std::optional<std::string> topology, catalog, traffic, mode, output, idle_mode;
  std::optional<double> alpha, beta, gamma, lambda, mu, sigma, bandwidth_price,
      dollars_per_watt, time_budget;
  std::optional<int> k_paths, hop_bound;
  std::optional<unsigned long long> max_nodes, max_routes, seed;

  void Register(CLI::App* app, bool traffic_is_trace) {
    app->add_option("--config", config, "JSON run configuration");
    app->add_option("--topology", topology, "topology JSON");
    app->add_option("--catalog", catalog, "VNF catalog JSON");
    app->add_option(traffic_is_trace ? "--trace,--traffic" : "--traffic", traffic,
                    "traffic CSV");
    app->add_option("--mode", mode, "exact, heuristic or both");
    app->add_option("--alpha", alpha, "deployment weight");
    app->add_option("--beta", beta, "energy weight");
    app->add_option("--gamma", gamma, "forwarding weight");
    app->add_option("--lambda", lambda, "SLO penalty weight");
    app->add_option("--mu", mu, "fragmentation weight");
    app->add_option("--sigma", sigma, "forwarding price, $ per Mbit per link");
    app->add_option("--bandwidth-price", bandwidth_price, "idle bandwidth price");
    app->add_option("--dollars-per-watt", dollars_per_watt, "energy price");
    app->add_option("--idle-mode", idle_mode, "per-slot or per-server");
    app->add_option("--k-paths", k_paths, "alternate paths tried by the heuristic");
    app->add_option("--hop-bound", hop_bound, "exact route hop bound (0 = switches)");
    app->add_option("--max-nodes", max_nodes, "exact search node limit");
    app->add_option("--max-routes", max_routes, "exact route enumeration limit");
    app->add_option("--time-budget", time_budget, "exact search time budget, s");
    app->add_option("--seed", seed, "random seed");
  }

  vnfop::RunConfig Build() const {
    vnfop::RunConfig c;
    if (!config.empty()) vnfop::ApplyConfigJson(vnfop::ReadFile(config), c);
    auto set = [](auto& dst, const auto& src) {
      if (src) dst = *src;
    };
    set(c.topology, topology);
    set(c.catalog, catalog);
    set(c.traffic, traffic);
    set(c.mode, mode);
    set(c.output, output);
    set(c.weights.alpha, alpha);
    set(c.weights.beta, beta);
    set(c.weights.gamma, gamma);
    set(c.weights.lambda, lambda);
    set(c.weights.mu, mu);
    set(c.weights.sigma, sigma);
    set(c.weights.bandwidth_price, bandwidth_price);
    set(c.weights.dollars_per_watt, dollars_per_watt);
    if (idle_mode) c.weights.idle_mode = vnfop::ParseIdleMode(*idle_mode);
    set(c.heuristic.k_paths, k_paths);
    set(c.limits.hop_bound, hop_bound);
    set(c.limits.max_nodes, max_nodes);
    set(c.limits.max_routes, max_routes);
    set(c.limits.time_budget_s, time_budget);
    set(c.seed, seed);
    return c;
  }
};

int Run(int argc, char** argv) {
  CLI::App app{"VNF placement and routing: exact and Viterbi-heuristic solvers"};
  app.require_subcommand(1);

  Overrides solve_flags;
  auto* solve = app.add_subcommand("solve", "provision a traffic file, write a solution");
  solve_flags.Register(solve, false);
  solve->add_option("--out", solve_flags.output, "solution JSON (default stdout)");

  Overrides sim_flags;
  auto* simulate = app.add_subcommand("simulate", "replay a trace, write metrics");
  sim_flags.Register(simulate, true);
  simulate->add_option("--out-dir", sim_flags.output, "output directory");

  std::string a, b, ratio_out;
  auto* compare = app.add_subcommand("compare", "ratio series of two metrics CSVs");
  compare->add_option("a", a, "numerator metrics CSV")->required();
  compare->add_option("b", b, "denominator metrics CSV")->required();
  compare->add_option("--out", ratio_out, "ratio CSV (default stdout)");

  std::string report_path;
  auto* report = app.add_subcommand("report", "summarize a metrics or ratio file");
  report->add_option("path", report_path, "metrics CSV/JSON or ratio CSV")->required();

  Overrides gen_flags;
  vnfop::TraceOptions trace;
  auto* gen = app.add_subcommand("gen-trace", "seeded synthetic trace");
  gen->add_option("--config", gen_flags.config, "JSON run configuration");
  gen->add_option("--topology", gen_flags.topology, "topology JSON");
  gen->add_option("--catalog", gen_flags.catalog, "VNF catalog JSON");
  gen->add_option("--seed", gen_flags.seed, "random seed");
  gen->add_option("--out", gen_flags.output, "trace CSV (default stdout)");
  gen->add_option("--batches", trace.batches, "number of batches");
  gen->add_option("--mean-requests", trace.mean_requests, "mean requests per batch");
  gen->add_option("--amplitude", trace.amplitude, "relative daily swing");
  gen->add_option("--period", trace.period, "batches per cycle");
  gen->add_option("--min-chain", trace.min_chain, "shortest chain");
  gen->add_option("--max-chain", trace.max_chain, "longest chain");
  gen->add_option("--min-bandwidth", trace.min_bandwidth, "Mbps");
  gen->add_option("--max-bandwidth", trace.max_bandwidth, "Mbps");
  gen->add_option("--delay-budget", trace.delay_budget_ms, "ms");
  gen->add_option("--penalty-rate", trace.penalty_rate, "$ per ms over budget");

  Overrides aug_flags;
  auto* augment = app.add_subcommand("augment", "dump the enumerated VNF slots");
  augment->add_option("--topology", aug_flags.topology, "topology JSON");
  augment->add_option("--catalog", aug_flags.catalog, "VNF catalog JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : vnfop::cli::kExitError;
  }

  try {
    if (*solve) return vnfop::cli::Solve(solve_flags.Build(), std::cout, std::cerr);
    if (*simulate) {
      return vnfop::cli::Simulate(sim_flags.Build(), std::cout, std::cerr);
    }
    if (*compare) return vnfop::cli::CompareFiles(a, b, ratio_out, std::cout, std::cerr);
    if (*report) return vnfop::cli::Report(report_path, std::cout, std::cerr);
    if (*gen) {
      vnfop::RunConfig c = gen_flags.Build();
      trace.seed = c.seed;
      return vnfop::cli::GenTrace(c, trace, std::cout, std::cerr);
    }
    if (*augment) return vnfop::cli::Augment(aug_flags.Build(), std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return vnfop::cli::kExitError;
  }
  return vnfop::cli::kExitError;
}

}  // namespace

int main(int argc, char** argv) { return Run(argc, argv); }
