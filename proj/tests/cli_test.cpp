#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "schedopt/errors.hpp"

namespace fs = std::filesystem;
using namespace schedopt;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "schedopt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(SCHEDOPT_TEST_TMP);
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

double field(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  for (std::string k; in >> k;) {
    double v;
    if (k == key && in >> v) return v;
  }
  ADD_FAILURE() << "no field " << key << " in\n" << out;
  return 0.0;
}

}  // namespace

TEST(IndexConvention, MapsTimesToGrid) {
  EXPECT_EQ(cli::time_to_index(0.959), 958);
  EXPECT_EQ(cli::time_to_index(0.716), 715);
  EXPECT_EQ(cli::time_to_index(0.370), 369);
  EXPECT_EQ(cli::time_to_index(0.030), 29);
  EXPECT_EQ(cli::time_to_index(1.0), 999);
  EXPECT_EQ(cli::time_to_index(0.0001), 0);
}

TEST(ParseInterval, Forms) {
  EXPECT_EQ(cli::parse_interval("3:16"), (Interval{3.0, 16.0}));
  EXPECT_EQ(cli::parse_interval("7"), (Interval{7.0, 7.0}));
  EXPECT_THROW(cli::parse_interval("2:1"), std::invalid_argument);
  EXPECT_THROW(cli::parse_interval("a:b"), std::invalid_argument);
}

TEST(Optimize, WritesExportAndIndexList) {
  const auto out = scratch("s.json");
  const auto r = run_cli({"optimize", "--nfe", "4", "--model", "vp-scaled-linear", "--seed", "42", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(slurp(out));
  const auto indices = doc["indices"].get<std::vector<int>>();
  ASSERT_EQ(indices.size(), 4u);
  for (std::size_t i = 0; i + 1 < indices.size(); ++i) EXPECT_GE(indices[i] - indices[i + 1], 150);
  EXPECT_EQ(doc["times"].size(), 5u);
  EXPECT_EQ(doc["terminal_time"].get<double>(), doc["times"].back().get<double>());
  EXPECT_EQ(doc["seed"].get<int>(), 42);
  EXPECT_EQ(doc["version"].get<std::string>(), cli::kToolVersion);
  EXPECT_FALSE(doc["penalty_disabled"].get<bool>());
  EXPECT_TRUE(doc.contains("settings"));
  const auto list = slurp(scratch("s.indices.txt"));
  std::istringstream in(list);
  std::vector<int> listed;
  for (int v; in >> v;) listed.push_back(v);
  EXPECT_EQ(listed, indices);
}

TEST(Optimize, ListFormatOnlyWritesIndices) {
  const auto out = scratch("l.txt");
  ASSERT_EQ(run_cli({"optimize", "--nfe", "4", "--format", "list", "--out", out.string()}).code, 0);
  std::istringstream in(slurp(out));
  int count = 0;
  for (int v; in >> v;) ++count;
  EXPECT_EQ(count, 4);
}

TEST(Optimize, GammaZeroFlagsPenaltyDisabled) {
  const auto out = scratch("g0.json");
  ASSERT_EQ(run_cli({"optimize", "--gamma", "0", "--nfe", "4", "--out", out.string()}).code, 0);
  EXPECT_TRUE(nlohmann::json::parse(slurp(out))["penalty_disabled"].get<bool>());
}

TEST(Optimize, SingletonBoundsAreDeterministic) {
  const auto a = scratch("two_a.json");
  const auto b = scratch("two_b.json");
  for (const auto& path : {a, b}) {
    ASSERT_EQ(run_cli({"optimize", "--nfe", "2", "--bounds-rho", "7:7", "--bounds-teps", "0.02:0.02", "--bounds-tmax",
                       "0.98:0.98", "--out", path.string()})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(nlohmann::json::parse(slurp(a))["indices"].size(), 2u);
}

TEST(Optimize, ExitCodes) {
  EXPECT_EQ(run_cli({"optimize", "--bounds-teps", "0.5:0.6", "--bounds-tmax", "0.3:0.4"}).code, 2);
  EXPECT_EQ(run_cli({"optimize", "--model", "nope"}).code, 1);
  EXPECT_EQ(run_cli({"optimize", "--population", "2"}).code, 1);
  EXPECT_EQ(run_cli({"optimize", "--nfe", "1"}).code, 1);
  EXPECT_EQ(run_cli({"optimize", "--format", "xml"}).code, 1);
  EXPECT_EQ(run_cli({"optimize", "--no-such-flag"}).code, 1);
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Config, FileValuesAndFlagOverride) {
  const auto cfg = scratch("run.cfg");
  write(cfg, "nfe = 5\nseed = 3\npopulation = 6\ngenerations = 3\n");
  const auto out = scratch("cfg.json");
  ASSERT_EQ(run_cli({"optimize", "--config", cfg.string(), "--out", out.string()}).code, 0);
  auto doc = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(doc["nfe"].get<int>(), 5);
  EXPECT_EQ(doc["settings"]["search"]["population"].get<int>(), 6);
  ASSERT_EQ(run_cli({"optimize", "--config", cfg.string(), "--nfe", "3", "--out", out.string()}).code, 0);
  doc = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(doc["nfe"].get<int>(), 3);
  EXPECT_EQ(doc["seed"].get<int>(), 3);

  write(cfg, "nfe = 4\nunknown-key = 1\n");
  EXPECT_EQ(run_cli({"optimize", "--config", cfg.string()}).code, 1);
  EXPECT_EQ(run_cli({"optimize", "--config", scratch("missing.cfg").string()}).code, 1);
}

TEST(Evaluate, ExportRoundTrip) {
  const auto out = scratch("rt.json");
  ASSERT_EQ(run_cli({"optimize", "--nfe", "6", "--seed", "7", "--p", "1", "--gamma", "50", "--out", out.string()}).code,
            0);
  const auto doc = nlohmann::json::parse(slurp(out));
  const auto r = run_cli({"evaluate", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "j_mep"), doc["j_mep"].get<double>(), 1e-12);
  EXPECT_NEAR(field(r.out, "penalty"), doc["penalty"].get<double>(), 1e-12);
  EXPECT_NEAR(field(r.out, "spf_total"), doc["spf_total"].get<double>(), 1e-12);

  const auto loaded = cli::load_schedule(out.string(), NoiseScheduleModel::vp_scaled_linear());
  const MepConfig cfg{NoiseScheduleModel::vp_scaled_linear(), 1};
  SpfSettings spf_settings;
  spf_settings.gamma = 50.0;
  const auto report = spf(cfg, spf_settings, loaded.schedule, loaded.nfe);
  EXPECT_EQ(report.j_mep, doc["j_mep"].get<double>());
  EXPECT_EQ(report.penalty, doc["penalty"].get<double>());
}

TEST(Evaluate, PenaltyOnTimeAndIndexLists) {
  const auto times = scratch("collapsed.txt");
  write(times, "0.999\n0.070\n0.009\n0.009\n");
  auto r = run_cli({"evaluate", times.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "penalty"), 0.030421, 1e-9);

  const auto spread = scratch("spread.txt");
  write(spread, "959\n716\n370\n30\n");
  r = run_cli({"evaluate", spread.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "penalty"), 0.0);
  EXPECT_EQ(field(r.out, "nfe"), 4.0);

  const auto pair = scratch("pair.txt");
  write(pair, "0.9\n0.2\n");
  r = run_cli({"evaluate", pair.string(), "--nfe", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "penalty"), 0.0);
}

TEST(Evaluate, MalformedFiles) {
  const auto bad = scratch("bad.txt");
  write(bad, "0.5\nbanana\n");
  EXPECT_EQ(run_cli({"evaluate", bad.string()}).code, 1);
  write(bad, "0.2\n0.5\n");
  EXPECT_EQ(run_cli({"evaluate", bad.string()}).code, 1);
  write(bad, "{\"lambdas\": [1, 2]}");
  EXPECT_EQ(run_cli({"evaluate", bad.string()}).code, 1);
  write(bad, "{ not json");
  EXPECT_EQ(run_cli({"evaluate", bad.string()}).code, 1);
  EXPECT_EQ(run_cli({"evaluate", scratch("absent.txt").string()}).code, 1);
  EXPECT_EQ(run_cli({"evaluate"}).code, 1);
}

TEST(Compare, VeTableOrdersOptimizedAheadOfUniformTime) {
  const auto r = run_cli({"compare", "--nfe", "4", "--model", "ve", "--seed", "42", "--lab-seeds", "64"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  std::map<std::string, double> lab;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string name;
    double j, gap, mean;
    row >> name >> j >> gap >> mean;
    lab[name] = mean;
  }
  ASSERT_EQ(lab.size(), 4u);
  EXPECT_LE(lab["optimized"], lab["uniform-t"]);
}

TEST(Compare, UsageErrors) {
  EXPECT_EQ(run_cli({"compare", "--families", ""}).code, 1);
  EXPECT_EQ(run_cli({"compare", "--families", "optimized,mystery"}).code, 1);
  EXPECT_EQ(run_cli({"compare", "--lab-rule", "rk4"}).code, 1);
}

TEST(Validate, DiagnosticsPass) {
  const auto r = run_cli({"validate"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}
