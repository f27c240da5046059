#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include <unistd.h>

#include "support.hpp"
#include "vnfop/cli.hpp"

namespace vnfop {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("vnfop_" + name + "_" +
                                           std::to_string(::getpid()))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& file) const { return (path_ / file).string(); }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

RunConfig WorkedExampleConfig(const std::string& traffic = "traffic.csv") {
  RunConfig c;
  c.topology = testing::DataPath("worked_example/topology.json");
  c.catalog = testing::DataPath("worked_example/catalog.json");
  c.traffic = testing::DataPath("worked_example/" + traffic);
  return c;
}

MetricsRecord RandomRecord(std::mt19937_64& rng, long long label) {
  std::uniform_real_distribution<double> u(0, 1000);
  std::uniform_int_distribution<int> hops(0, 6);
  MetricsRecord r;
  r.label = label;
  r.status = label % 2 ? "ok" : "partial";
  r.provisioned = hops(rng);
  r.failed = hops(rng);
  r.cost = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
  r.mean_utilization = u(rng) / 1000;
  r.active_servers = hops(rng);
  for (int i = hops(rng); i > 0; --i) {
    r.ingress_hops.push_back(hops(rng));
    r.egress_hops.push_back(hops(rng));
  }
  for (int i = hops(rng); i > 0; --i) r.stretch.push_back(1 + u(rng) / 100);
  return r;
}

TEST(Documents, MetricsRoundTripThroughCsvAndJson) {
  std::mt19937_64 rng(12);
  std::vector<MetricsRecord> records;
  for (int i = 0; i < 30; ++i) records.push_back(RandomRecord(rng, i * 3));
  EXPECT_EQ(ParseMetricsCsv(MetricsToCsv(records)), records);
  EXPECT_EQ(ParseMetricsJson(MetricsToJson(records).dump()), records);
  EXPECT_TRUE(ParseMetricsCsv(MetricsToCsv({})).empty());
  EXPECT_EQ(MetricsToCsv({}), std::string(kMetricsHeader) + "\n");
}

TEST(Documents, RatiosRoundTripIncludingInfinity) {
  std::vector<RatioRecord> ratios{{0, {1, 1.5, 2, 1, 0.25, 1.125}},
                                  {1, {1, 1, std::numeric_limits<double>::infinity(), 1, 1, 1}}};
  EXPECT_EQ(ParseRatiosCsv(RatiosToCsv(ratios)), ratios);
}

TEST(Documents, SolutionRoundTrips) {
  auto inst = testing::LoadInstance("worked_example", "trace.csv");
  for (SolverMode mode : {SolverMode::kHeuristic, SolverMode::kExact}) {
    SimulationOptions o;
    o.mode = mode;
    SimulationResult r = vnfop::Run(GroupIntoBatches(inst.traffic), inst.net, o);
    SolutionDocument doc = MakeSolution(*inst.net, mode, r.batches);
    EXPECT_EQ(ParseSolution(SerializeSolution(doc)), doc);
    EXPECT_EQ(doc.batches.size(), 3u);
  }
}

TEST(Documents, SchemaVersionIsChecked) {
  std::string csv = std::string(kMetricsHeader) + "\n2,0,ok,0,0,0,0,0,0,0,0,0,0,,,\n";
  EXPECT_THROW(ParseMetricsCsv(csv), ParseError);
  EXPECT_THROW(ParseSolution(R"({"schema_version": 9, "mode": "exact"})"), ParseError);
}

TEST(Documents, MalformedMetricsRowIsNamed) {
  std::string csv = std::string(kMetricsHeader) +
                    "\n1,0,ok,1,0,1,2,3,4,5,15,0.5,1,0,1,1\n"
                    "1,1,ok,1,0,1,two,3,4,5,15,0.5,1,0,1,1\n";
  try {
    ParseMetricsCsv(csv);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("metrics row 3: bad energy 'two'"), std::string::npos)
        << e.what();
  }
  EXPECT_THROW(ParseMetricsCsv("label,total\n1,2\n"), ParseError);
  EXPECT_THROW(ParseMetricsCsv(std::string(kMetricsHeader) + "\n1,2,3\n"), ParseError);
}

TEST(Config, JsonOverridesDefaults) {
  RunConfig c;
  ApplyConfigJson(R"({"mode": "both", "seed": 7,
                      "weights": {"alpha": 2, "mu": 0, "idle_mode": "per-server",
                                  "resource_price": {"cpu_cores": 3}},
                      "heuristic": {"k_paths": 5},
                      "exact": {"max_nodes": 100, "time_budget_s": 1.5}})",
                  c);
  EXPECT_EQ(c.mode, "both");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.weights.alpha, 2.0);
  EXPECT_EQ(c.weights.beta, 1.0);
  EXPECT_EQ(c.weights.mu, 0.0);
  EXPECT_EQ(c.weights.idle_mode, IdleEnergyMode::kPerServer);
  EXPECT_EQ(c.weights.ResourcePrice("cpu_cores"), 3.0);
  EXPECT_EQ(c.heuristic.k_paths, 5);
  EXPECT_EQ(c.limits.max_nodes, 100u);
  EXPECT_EQ(c.limits.time_budget_s, 1.5);
  ValidateConfig(c);
  EXPECT_THROW(ApplyConfigJson(R"({"weights": {"idle_mode": "sometimes"}})", c), Error);
  EXPECT_THROW(ApplyConfigJson(R"({"heuristic": {"k_paths": 1.5}})", c), ParseError);
  c.mode = "fastest";
  EXPECT_THROW(ValidateConfig(c), ValidationError);
}

TEST(CliSolve, WorkedExampleHeuristicHasThreePlacements) {
  std::ostringstream out, err;
  RunConfig c = WorkedExampleConfig();
  EXPECT_EQ(cli::Solve(c, out, err), cli::kExitOk) << err.str();
  SolutionDocument doc = ParseSolution(out.str());
  ASSERT_EQ(doc.batches.size(), 1u);
  const SolutionTraffic& t = doc.batches[0].traffics.at(0);
  EXPECT_TRUE(t.provisioned);
  ASSERT_EQ(t.placements.size(), 3u);
  EXPECT_EQ(t.placements[0].type, "firewall");
  EXPECT_EQ(t.placements[1].type, "ids");
  EXPECT_EQ(t.placements[2].type, "proxy");
  EXPECT_EQ(t.routes.size(), 4u);
  EXPECT_EQ(doc.total, doc.batches[0].cost);
}

TEST(CliSolve, ExactWritesFile) {
  TempDir dir("solve");
  std::ostringstream out, err;
  RunConfig c = WorkedExampleConfig();
  c.mode = "exact";
  c.output = dir / "solution.json";
  EXPECT_EQ(cli::Solve(c, out, err), cli::kExitOk) << err.str();
  SolutionDocument doc = ParseSolution(ReadFile(c.output));
  EXPECT_EQ(doc.mode, "exact");
  EXPECT_EQ(doc.batches.at(0).traffics.at(0).placements.size(), 3u);
}

TEST(CliSolve, MissingTopologyIsAnError) {
  std::ostringstream out, err;
  RunConfig c = WorkedExampleConfig();
  c.topology = testing::DataPath("worked_example/nope.json");
  EXPECT_EQ(cli::Solve(c, out, err), cli::kExitError);
  EXPECT_NE(err.str().find("nope.json"), std::string::npos) << err.str();
  c.topology.clear();
  EXPECT_EQ(cli::Solve(c, out, err), cli::kExitError);
  c = WorkedExampleConfig();
  c.mode = "both";
  EXPECT_EQ(cli::Solve(c, out, err), cli::kExitError);
}

TEST(CliSolve, InfeasibleFixtureExitsTwoNamingConstraint) {
  for (const char* mode : {"heuristic", "exact"}) {
    std::ostringstream out, err;
    RunConfig c = WorkedExampleConfig("infeasible.csv");
    c.mode = mode;
    EXPECT_EQ(cli::Solve(c, out, err), cli::kExitUnprovisioned) << mode;
    EXPECT_NE(err.str().find("traffic big not provisioned"), std::string::npos) << err.str();
    EXPECT_NE(err.str().find("Eq."), std::string::npos) << err.str();
    SolutionDocument doc = ParseSolution(out.str());
    EXPECT_FALSE(doc.batches.at(0).traffics.at(0).provisioned);
  }
}

TEST(CliSimulate, BothModesWriteMetricsAndRatios) {
  TempDir dir("simulate");
  std::ostringstream out, err;
  RunConfig c = WorkedExampleConfig("trace.csv");
  c.mode = "both";
  c.output = dir.str();
  ASSERT_EQ(cli::Simulate(c, out, err), cli::kExitOk) << err.str();
  for (const char* f : {"metrics_heuristic.csv", "metrics_exact.csv", "metrics_heuristic.json",
                        "metrics_exact.json", "timing_heuristic.csv", "timing_exact.csv",
                        "ratio.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  auto h = ParseMetricsCsv(ReadFile(dir / "metrics_heuristic.csv"));
  auto e = ParseMetricsCsv(ReadFile(dir / "metrics_exact.csv"));
  EXPECT_EQ(h, ParseMetricsJson(ReadFile(dir / "metrics_heuristic.json")));
  ASSERT_EQ(h.size(), 3u);
  auto ratios = ParseRatiosCsv(ReadFile(dir / "ratio.csv"));
  EXPECT_EQ(ratios, Compare(h, e));
  for (const RatioRecord& r : ratios) EXPECT_GE(r.ratio.total, 1.0 - 1e-9);
}

// Output from the first verified run is kept under data/worked_example/golden.
TEST(CliSimulate, MatchesGoldenFiles) {
  TempDir dir("golden");
  std::ostringstream out, err;
  RunConfig c = WorkedExampleConfig("trace.csv");
  c.mode = "both";
  c.output = dir.str();
  ASSERT_EQ(cli::Simulate(c, out, err), cli::kExitOk) << err.str();
  for (const char* f : {"metrics_heuristic.csv", "metrics_exact.csv", "ratio.csv"}) {
    EXPECT_EQ(ReadFile(dir / f), ReadFile(testing::DataPath(std::string("worked_example/golden/") + f)))
        << f;
  }
}

TEST(CliSimulate, EmptyTraceGivesHeaderOnly) {
  TempDir dir("empty");
  WriteFile(dir / "empty.csv", std::string(kTrafficHeader) + "\n");
  std::ostringstream out, err;
  RunConfig c = WorkedExampleConfig();
  c.traffic = dir / "empty.csv";
  c.output = dir / "out";
  ASSERT_EQ(cli::Simulate(c, out, err), cli::kExitOk) << err.str();
  EXPECT_EQ(ReadFile(dir / "out/metrics_heuristic.csv"), std::string(kMetricsHeader) + "\n");
}

TEST(CliSimulate, RerunIsByteIdentical) {
  TempDir a("rerun_a"), b("rerun_b");
  std::ostringstream out, err;
  RunConfig c = WorkedExampleConfig("trace.csv");
  c.mode = "both";
  c.output = a.str();
  ASSERT_EQ(cli::Simulate(c, out, err), cli::kExitOk);
  c.output = b.str();
  ASSERT_EQ(cli::Simulate(c, out, err), cli::kExitOk);
  for (const char* f : {"metrics_heuristic.csv", "metrics_exact.csv", "metrics_heuristic.json",
                        "metrics_exact.json", "ratio.csv"}) {
    EXPECT_EQ(ReadFile(a / f), ReadFile(b / f)) << f;
  }
}

TEST(CliReport, SingleRecordSummaryEqualsTheRecord) {
  TempDir dir("report1");
  MetricsRecord r;
  r.label = 4;
  r.status = "ok";
  r.provisioned = 2;
  r.cost = {10, 20, 3, 0, 7, 40};
  r.mean_utilization = 0.75;
  r.active_servers = 2;
  r.ingress_hops = {0, 1};
  r.egress_hops = {2, 2};
  r.stretch = {1, 1.5};
  WriteFile(dir / "m.csv", MetricsToCsv(std::span(&r, 1)));
  std::ostringstream out, err;
  ASSERT_EQ(cli::Report(dir / "m.csv", out, err), cli::kExitOk) << err.str();
  const std::string s = out.str();
  EXPECT_NE(s.find("total: mean 40, min 40, max 40"), std::string::npos) << s;
  EXPECT_NE(s.find("mean_utilization: mean 0.75, min 0.75, max 0.75"), std::string::npos) << s;
  EXPECT_NE(s.find("ingress_hop_cdf: 0=0.5 1=1"), std::string::npos) << s;
  EXPECT_NE(s.find("egress_hop_cdf: 0=0 1=0 2=1"), std::string::npos) << s;
  EXPECT_NE(s.find("stretch: mean 1.25, min 1, max 1.5"), std::string::npos) << s;
}

TEST(CliReport, TwoRecordsAreAveraged) {
  TempDir dir("report2");
  std::vector<MetricsRecord> rs(2);
  rs[0].label = 0;
  rs[0].status = rs[1].status = "ok";
  rs[1].label = 1;
  rs[0].cost.total = 30;
  rs[1].cost.total = 50;
  rs[0].cost.energy = 1;
  rs[1].cost.energy = 4;
  rs[0].mean_utilization = 0.5;
  rs[1].mean_utilization = 1.0;
  WriteFile(dir / "m.json", MetricsToJson(rs).dump(2));
  std::ostringstream out, err;
  ASSERT_EQ(cli::Report(dir / "m.json", out, err), cli::kExitOk) << err.str();
  EXPECT_NE(out.str().find("total: mean 40, min 30, max 50"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("energy: mean 2.5, min 1, max 4"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("mean_utilization: mean 0.75"), std::string::npos) << out.str();

  WriteFile(dir / "r.csv", RatiosToCsv(Compare(rs, rs)));
  std::ostringstream rout;
  ASSERT_EQ(cli::Report(dir / "r.csv", rout, err), cli::kExitOk) << err.str();
  EXPECT_NE(rout.str().find("total ratio: mean 1, max 1"), std::string::npos) << rout.str();
}

TEST(CliReport, MalformedCsvNamesTheRow) {
  TempDir dir("report3");
  WriteFile(dir / "bad.csv", std::string(kMetricsHeader) + "\n1,0,ok,1,0,1,2,3,4,5,15,0.5,x,,,\n");
  std::ostringstream out, err;
  EXPECT_EQ(cli::Report(dir / "bad.csv", out, err), cli::kExitError);
  EXPECT_NE(err.str().find("metrics row 2"), std::string::npos) << err.str();
}

TEST(CliCompare, RatioOfTwoMetricsFiles) {
  TempDir dir("compare");
  std::mt19937_64 rng(3);
  std::vector<MetricsRecord> a{RandomRecord(rng, 0), RandomRecord(rng, 1)};
  std::vector<MetricsRecord> b = a;
  for (MetricsRecord& r : a) {
    r.cost.total *= 2;
  }
  WriteFile(dir / "a.csv", MetricsToCsv(a));
  WriteFile(dir / "b.csv", MetricsToCsv(b));
  std::ostringstream out, err;
  ASSERT_EQ(cli::CompareFiles(dir / "a.csv", dir / "b.csv", "", out, err), cli::kExitOk);
  auto ratios = ParseRatiosCsv(out.str());
  ASSERT_EQ(ratios.size(), 2u);
  EXPECT_EQ(ratios[0].ratio.total, 2.0);
  EXPECT_EQ(ratios[1].ratio.energy, 1.0);
  b[1].label = 9;
  WriteFile(dir / "b.csv", MetricsToCsv(b));
  EXPECT_EQ(cli::CompareFiles(dir / "a.csv", dir / "b.csv", "", out, err), cli::kExitError);
}

TEST(CliGenTrace, SeededOutputLoadsBack) {
  RunConfig c = WorkedExampleConfig();
  TraceOptions o;
  o.batches = 5;
  std::ostringstream a, b, err;
  ASSERT_EQ(cli::GenTrace(c, o, a, err), cli::kExitOk) << err.str();
  ASSERT_EQ(cli::GenTrace(c, o, b, err), cli::kExitOk);
  EXPECT_EQ(a.str(), b.str());
  auto inst = testing::WorkedExample();
  auto traffic = LoadTraffic(a.str(), inst.net->topology(), inst.net->catalog());
  EXPECT_FALSE(traffic.empty());
}

}  // namespace
}  // namespace vnfop
