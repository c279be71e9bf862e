#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "corridor_cli.hpp"

namespace corridor::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "corridor");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string fixture() {
  const char* d = std::getenv("CORRIDOR_DATA_DIR");
  return std::string(d ? d : "data") + "/fixture_cohort.csv";
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("corridor_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, DesignUnitModelJson) {
  const auto r = invoke({"design", "--a", "1,2,3", "--g", "1,1", "--corridor", "1:5", "--json"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const CascadeModel model(1, 2, 3, 1, 1);
  const double T = j["T_star"].get<double>();
  EXPECT_NEAR(psi(model, T), 1.25, 1.25e-9);
  const auto d = solve_corridor(model, {1.0, 5.0});
  EXPECT_EQ(T, d.T_star);
  EXPECT_EQ(j["lambda_star"].get<double>(), d.lambda_star);
}

TEST_F(CliTest, DesignPkpdMatchesLibrary) {
  const auto r = invoke({"design", "--alpha", "0.0374", "--corridor-effect", "2:10", "--json"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const auto v = pkpd::assess_feasibility({"m", 0.0374, 2.6677});
  EXPECT_EQ(j["T_star"].get<double>(), v.T_star);
  EXPECT_EQ(j["lambda_star"].get<double>(), v.lambda_star);
}

TEST_F(CliTest, DesignTextReport) {
  const auto r = invoke({"design", "--a", "1,2,3", "--g", "1,1", "--corridor", "1:5"});
  ASSERT_EQ(r.code, kOk);
  for (const char* key : {"T*", "lambda*", "tau1", "tau2", "y_min", "y_max", "X*"}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
}

TEST_F(CliTest, DesignWithoutCorridorIsAUsageError) {
  const auto r = invoke({"design", "--a", "1,2,3", "--g", "1,1"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("--corridor"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({}).code, kUsage);
  EXPECT_EQ(invoke({"design", "--alpha", "0.5", "--corridor", "1:2"}).code, kUsage);
  EXPECT_EQ(invoke({"design", "--a", "1,1,3", "--g", "1,1", "--corridor", "1:2"}).code, kUsage);
  EXPECT_EQ(invoke({"design", "--a", "1,2,3", "--g", "1,1", "--corridor", "5:1"}).code, kUsage);
  EXPECT_EQ(invoke({"design", "--a", "1,2,3", "--g", "1,1", "--corridor-effect", "2:10"}).code, kUsage);
  EXPECT_EQ(invoke({"design", "--alpha", "0.03", "--a", "1,2,3", "--g", "1,1", "--corridor", "1:2"}).code, kUsage);
  EXPECT_EQ(invoke({"bogus"}).code, kUsage);
}

TEST_F(CliTest, DesignSolverFailureExitsTwo) {
  const auto r = invoke({"design", "--a", "1,2,3", "--g", "1,1", "--corridor", "1:5", "--initial-period", "1e-300"});
  EXPECT_EQ(r.code, kFailure);
}

TEST_F(CliTest, SimulateRoundTripsTheCorridor) {
  const auto out = path("traj.csv");
  const auto r = invoke({"simulate", "--a", "1,2,3", "--g", "1,1", "--corridor", "2:10", "--firings", "3",
                         "--samples", "20000", "--out", out, "--json"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["last_period_y_min"].get<double>(), 2.0, 2e-5);
  EXPECT_NEAR(j["last_period_y_max"].get<double>(), 10.0, 1e-4);
  EXPECT_TRUE(fs::exists(out));
}

TEST_F(CliTest, SimulatePkpdReportsConcentrationAndEffect) {
  const auto out = path("traj.csv");
  const auto r = invoke({"simulate", "--alpha", "0.0374", "--corridor-effect", "2:10", "--firings", "2",
                         "--samples", "20000", "--pkpd", "--out", out, "--json"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const auto c = pkpd::concentration_corridor(pkpd::default_effect_corridor(), 2.6677);
  EXPECT_LT(std::abs(j["last_period_y_min"].get<double>() / c.y_min - 1), 1e-5);
  EXPECT_LT(std::abs(j["last_period_y_max"].get<double>() / c.y_max - 1), 1e-5);
  EXPECT_NEAR(j["last_period_effect_min"].get<double>(), 2.0, 1e-3);
  EXPECT_NEAR(j["last_period_effect_max"].get<double>(), 10.0, 1e-3);
}

TEST_F(CliTest, SimulateSingleFiring) {
  const auto out = path("one.csv");
  const auto r = invoke({"simulate", "--a", "1,2,3", "--g", "1,1", "--lambda", "1", "--period", "1", "--firings",
                         "1", "--samples", "5", "--out", out});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::istringstream in(slurp(out));
  std::string line;
  int flagged = 0, rows = 0;
  std::getline(in, line);
  while (std::getline(in, line)) {
    ++rows;
    if (line.back() == '1') ++flagged;
  }
  EXPECT_EQ(flagged, 2);
  EXPECT_EQ(rows, 2 + 4 + 1);
}

TEST_F(CliTest, SimulateRejectsBadValues) {
  const auto out = path("x.csv");
  EXPECT_EQ(invoke({"simulate", "--a", "1,2,3", "--g", "1,1", "--lambda", "0", "--period", "1", "--out", out}).code,
            kUsage);
  EXPECT_EQ(invoke({"simulate", "--a", "1,2,3", "--g", "1,1", "--lambda", "-1", "--period", "1", "--out", out}).code,
            kUsage);
  EXPECT_EQ(invoke({"simulate", "--a", "1,2,3", "--g", "1,1", "--lambda", "1", "--period", "1", "--weight-slope",
                    "1", "--out", out})
                .code,
            kUsage);
  EXPECT_EQ(invoke({"simulate", "--a", "1,2,3", "--g", "1,1", "--out", out}).code, kUsage);
}

TEST_F(CliTest, CohortFixtureCornersAndConsistency) {
  const auto out = path("verdicts.csv");
  const auto r = invoke({"cohort", "--in", fixture(), "--out", out, "--json"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto j = nlohmann::json::parse(slurp(path("verdicts.json")));
  std::size_t feasible = 0;
  for (const auto& v : j["verdicts"]) {
    feasible += v["feasible"].get<bool>();
    if (v["pin"] == "LOWG") EXPECT_FALSE(v["feasible"].get<bool>());
    if (v["pin"] == "HIGHG") EXPECT_TRUE(v["feasible"].get<bool>());
  }
  EXPECT_EQ(j["summary"]["feasible"].get<std::size_t>(), feasible);
  EXPECT_EQ(j["summary"]["total"].get<std::size_t>(), j["verdicts"].size());
  EXPECT_FALSE(j.contains("metadata"));
}

TEST_F(CliTest, CohortMalformedRowNamesTheLine) {
  const auto in = path("bad.csv");
  std::ofstream(in) << "pin,alpha,gamma\nA,0.03,2.5\nB,zero,2\n";
  const auto lax = invoke({"cohort", "--in", in, "--out", path("v.csv")});
  EXPECT_EQ(lax.code, kOk);
  EXPECT_NE(lax.err.find("line 3"), std::string::npos);
  const auto strict = invoke({"cohort", "--in", in, "--out", path("v.csv"), "--strict"});
  EXPECT_EQ(strict.code, kFailure);
}

TEST_F(CliTest, CohortMissingInputIsAUsageError) {
  EXPECT_EQ(invoke({"cohort", "--in", path("nope.csv")}).code, kUsage);
  EXPECT_EQ(invoke({"cohort"}).code, kUsage);
}

TEST_F(CliTest, CohortWritesPsiCurves) {
  const auto in = path("two.csv");
  std::ofstream(in) << "pin,alpha,gamma\nA,0.03,2.5\nB,0.05,4\n";
  const auto r = invoke({"cohort", "--in", in, "--out", path("v.csv"), "--psi-curves", path("curves"),
                         "--psi-points", "20"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(fs::exists(path("curves/psi_curve_A.csv")));
  EXPECT_TRUE(fs::exists(path("curves/psi_curve_B.csv")));
}

TEST_F(CliTest, PsiCurveToStdout) {
  const auto r = invoke({"psi-curve", "--alpha", "0.0374", "--points", "10"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out.rfind("T,z_min,z_max,z_diff,psi\n", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 11);
  EXPECT_EQ(invoke({"psi-curve", "--alpha", "0.0374", "--t-min", "5", "--t-max", "1"}).code, kUsage);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  const std::vector<std::vector<std::string>> commands = {
      {"cohort", "--in", fixture(), "--json", "--threads", "3"},
      {"simulate", "--alpha", "0.03", "--corridor-effect", "2:10", "--weight-slope", "-10", "--period-slope", "0.5",
       "--firings", "20", "--samples", "50"},
      {"psi-curve", "--a", "0.5,1.5,4", "--g", "2,0.3", "--points", "50"},
      {"design", "--alpha", "0.05", "--corridor-effect", "2:10", "--json"},
  };
  for (std::size_t k = 0; k < commands.size(); ++k) {
    std::string first_files, first_out;
    for (int rep = 0; rep < 2; ++rep) {
      const auto data = path("run" + std::to_string(rep) + ".csv");
      auto args = commands[k];
      args.push_back("--out");
      args.push_back(data);
      const auto r = invoke(args);
      ASSERT_EQ(r.code, kOk) << r.err;
      std::string files = slurp(data);
      if (fs::exists(path("run" + std::to_string(rep) + ".json"))) files += slurp(path("run" + std::to_string(rep) + ".json"));
      ASSERT_FALSE(files.empty());
      if (rep == 0) {
        first_files = files;
        first_out = r.out;
      } else {
        EXPECT_EQ(files, first_files) << k;
        EXPECT_EQ(r.out, first_out) << k;
      }
    }
  }
}

TEST_F(CliTest, TimestampOnlyInMetadata) {
  const auto r = invoke({"cohort", "--in", fixture(), "--out", path("v.csv"), "--json", "--timestamp"});
  ASSERT_EQ(r.code, kOk);
  const auto j = nlohmann::json::parse(slurp(path("v.json")));
  ASSERT_TRUE(j.contains("metadata"));
  EXPECT_TRUE(j["metadata"].contains("generated_at"));
}

}  // namespace
}  // namespace corridor::cli
