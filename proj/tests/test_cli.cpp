#include "rempc/config.hpp"
#include "rempc/version.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

using namespace rempc;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(REMPC_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("rempc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string prefix(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

double ross_z(const std::string& prefix) {
  return nlohmann::json::parse(slurp(prefix + ".ross.json"))["ross"]["z_s"][0].get<double>();
}

}  // namespace

TEST_F(Cli, RossNominalAndMax) {
  CliRun r = run_cli("ross --model growth --cost nominal --out " + prefix("nom"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(ross_z(prefix("nom")), 2.2344, 1e-3);
  r = run_cli("ross --model growth --cost max --out " + prefix("max"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(ross_z(prefix("max")), 3.2344, 1e-3);
}

TEST_F(Cli, ZeroTubeCollapsesToNominal) {
  CliRun r = run_cli("ross --model growth --cost max --omega 0 0 --out " + prefix("zero"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(ross_z(prefix("zero")), 2.2344, 1e-3);
}

TEST_F(Cli, SimulateWritesArtifacts) {
  const CliRun r = run_cli("simulate --cost max --diss fix --steps 20 --seed 4 --out " + prefix("sim"));
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* ext : {".csv", ".csv.meta.json", ".report.jsonl", ".margins.csv"}) {
    EXPECT_TRUE(fs::exists(prefix("sim") + ext)) << ext;
  }
  const std::string csv = slurp(prefix("sim") + ".csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x,z0,z1,v0,u,w,cost_real,cost_nom,V_N,Vrot_N,lambda");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);
  const nlohmann::json meta = nlohmann::json::parse(slurp(prefix("sim") + ".csv.meta.json"));
  EXPECT_EQ(meta["version"], std::string(version()));
  EXPECT_EQ(meta["seed"], 4);
  EXPECT_EQ(meta["config"]["diss"], "fix");
}

TEST_F(Cli, SimulateIsReproducibleFromEmbeddedConfig) {
  ASSERT_EQ(run_cli("simulate --cost int --diss lambda --steps 15 --seed 9 --out " + prefix("a")).code, 0);
  const nlohmann::json meta = nlohmann::json::parse(slurp(prefix("a") + ".csv.meta.json"));
  RunConfig cfg = config_from_json(meta["config"]);
  cfg.out = prefix("b");
  std::ofstream(prefix("b") + ".json") << to_json(cfg).dump(2);
  ASSERT_EQ(run_cli("simulate --config " + prefix("b") + ".json").code, 0);
  EXPECT_EQ(slurp(prefix("a") + ".csv"), slurp(prefix("b") + ".csv"));
}

TEST_F(Cli, InfeasibleRunExitsTwoWithPartialTrace) {
  const CliRun r = run_cli("simulate --x0 12 --steps 5 --out " + prefix("bad"));
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_TRUE(fs::exists(prefix("bad") + ".csv"));
}

TEST_F(Cli, BadInputExitsOne) {
  EXPECT_EQ(run_cli("simulate --bogus 1").code, 1);
  EXPECT_EQ(run_cli("simulate --cost quadratic").code, 1);
  EXPECT_EQ(run_cli("simulate --horizon 0 --out " + prefix("h")).code, 1);
  EXPECT_EQ(run_cli("ross --model pendulum --out " + prefix("m")).code, 1);
  EXPECT_EQ(run_cli("").code, 1);
  std::ofstream(prefix("c") + ".json") << R"({"horizon": 10, "no_such_key": 1})";
  EXPECT_EQ(run_cli("simulate --config " + prefix("c") + ".json").code, 1);
  std::ofstream(prefix("d") + ".json") << R"({"horizon": "ten"})";
  EXPECT_EQ(run_cli("simulate --config " + prefix("d") + ".json").code, 1);
}

TEST_F(Cli, FlagsOverrideTheConfigFile) {
  std::ofstream(prefix("cfg") + ".json") << R"({"cost": "nominal", "steps": 50, "horizon": 7})";
  ASSERT_EQ(run_cli("simulate --config " + prefix("cfg") + ".json --steps 6 --out " + prefix("o")).code, 0);
  const nlohmann::json meta = nlohmann::json::parse(slurp(prefix("o") + ".csv.meta.json"));
  EXPECT_EQ(meta["config"]["steps"], 6);
  EXPECT_EQ(meta["config"]["horizon"], 7);
  EXPECT_EQ(meta["config"]["cost"], "nominal");
}

TEST_F(Cli, TurnpikeTable) {
  std::ofstream(prefix("t") + ".json") << R"({"cost": "nominal", "turnpike_z0": [1.0, 2.2344211], "epsilons": [0.05, 100.0]})";
  const CliRun r = run_cli("turnpike --config " + prefix("t") + ".json --out " + prefix("t"));
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream csv(slurp(prefix("t") + ".turnpike.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  std::map<double, double> previous;
  while (std::getline(csv, line)) {
    double z0, eps, fraction;
    int n, count;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%d,%lf,%d,%lf", &z0, &n, &eps, &count, &fraction), 5) << line;
    ++rows;
    EXPECT_DOUBLE_EQ(fraction, static_cast<double>(count) / n);
    if (eps > 10.0) {
      EXPECT_EQ(fraction, 1.0) << line;
      continue;
    }
    // Starting on the steady state leaves it only at the end of the horizon.
    EXPECT_GE(fraction, previous[z0]) << line;
    if (z0 > 2.0) EXPECT_GE(count, n - 4) << line;
    previous[z0] = fraction;
  }
  EXPECT_GE(previous[1.0], 0.8);
  EXPECT_EQ(rows, 2 * 4 * 2);
}

TEST_F(Cli, Version) {
  const CliRun r = run_cli("--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(std::string(version())), std::string::npos);
}

TEST(Config, JsonRoundTrip) {
  RunConfig c;
  c.cost = "int";
  c.diss = "lambda";
  c.seed = 77;
  c.x0 = std::vector<double>{4.5};
  c.omega = std::vector<double>{-0.5, 0.5};
  c.model_params = {{"productivity", 4.5}};
  c.epsilons = {0.01, 0.2};
  const nlohmann::json j = to_json(c);
  EXPECT_EQ(to_json(config_from_json(j)), j);
}

TEST(Config, ValidationRejectsBadValues) {
  RunConfig c;
  c.steps = -1;
  EXPECT_THROW(c.validate(), Error);
  c = RunConfig{};
  c.diss = "sometimes";
  EXPECT_THROW(c.validate(), Error);
}
