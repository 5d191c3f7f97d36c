#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "cotred/app/commands.hpp"
#include "cotred/app/config.hpp"
#include "cotred/app/selftest.hpp"

using namespace cotred::app;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Workdir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cotred_app_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }
  static std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  static int run_cli(const std::string& args) {
    const std::string cmd = std::string(COTRED_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

const char* kRigidBody = R"({"system": "rigid-body", "dt": 2e-3, "t_max": 15.0,
                             "inertia": [3, 2, 1], "initial": {"pi": [2.0, 0.3, 0.1]},
                             "phase": {"samples_per_period": 4000}})";

}  // namespace

TEST(Config, MissingDtIsNamed) {
  try {
    parse_config(json::parse(R"({"system": "rigid-body"})"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("dt"), std::string::npos);
  }
}

TEST(Config, UnknownKeysRejectedWithPath) {
  try {
    parse_config(json::parse(R"({"system": "rigid-body", "dt": 0.1, "initial": {"pie": [1, 0, 0]}})"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("initial.pie"), std::string::npos) << e.what();
  }
}

TEST(Config, RejectsInvalidPhysics) {
  EXPECT_THROW(parse_config(json::parse(R"({"system": "rigid-body", "dt": -1})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"system": "rigid-body", "dt": 0.1, "inertia": [1, 2, 3]})")),
               std::exception);
  EXPECT_THROW(parse_config(json::parse(R"({"system": "kaluza", "dt": 0.1, "field": {"type": "dipole"}})")),
               ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"system": "pendulum", "dt": 0.1})")), ConfigError);
}

TEST(Config, Defaults) {
  const RunConfig c = parse_config(json::parse(R"({"system": "heavy-top", "dt": 0.01})"));
  EXPECT_EQ(c.system, SystemChoice::HeavyTop);
  EXPECT_EQ(c.tolerances.phase_tol, 1e-3);
  EXPECT_FALSE(c.gamma.has_value());
  EXPECT_EQ(c.samples_per_period, 20000u);
}

TEST(Commands, SimulateRigidBodyEquilibriumIsConstant) {
  RunConfig c = parse_config(json::parse(
      R"({"system": "rigid-body", "dt": 0.01, "t_max": 1.0, "initial": {"pi": [1.5, 0, 0]}})"));
  std::stringstream csv;
  const RunOutcome out = simulate(c, csv);
  EXPECT_EQ(out.exit_code, exit_code::ok);
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "t,R11,R12,R13,R21,R22,R23,R31,R32,R33,Pi1,Pi2,Pi3,energy,casimir,spatial_mu_err");
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    for (int k = 0; k < 11; ++k) std::getline(ss, cell, ',');
    EXPECT_EQ(std::stod(cell), 1.5);
  }
  EXPECT_EQ(rows, 101);
}

TEST(Commands, SimulateHeavyTopCasimirDrift) {
  const RunConfig c = parse_config(json::parse(
      R"({"system": "heavy-top", "dt": 1e-3, "t_max": 5.0, "inertia": [2, 2, 1],
          "lagrange": {"tilt": 0.6, "spin": 4.0}})"));
  std::stringstream csv;
  const RunOutcome out = simulate(c, csv);
  EXPECT_EQ(out.exit_code, exit_code::ok);
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "t,Pi1,Pi2,Pi3,Gamma1,Gamma2,Gamma3,energy,casimir1,casimir2");
  for (const auto& [key, value] : out.drift.items()) EXPECT_LT(value.get<double>(), 1e-8) << key;
}

TEST(Commands, SimulateKaluzaHeader) {
  const RunConfig c = parse_config(json::parse(R"({"system": "kaluza", "dt": 0.01, "t_max": 1.0})"));
  std::stringstream csv;
  EXPECT_EQ(simulate(c, csv).exit_code, exit_code::ok);
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "t,qx,qy,qz,px,py,pz,energy");
}

TEST(Commands, PhaseRigidBodyReport) {
  const RunOutcome out = phase(parse_config(json::parse(kRigidBody)));
  EXPECT_EQ(out.exit_code, exit_code::ok);
  const json& r = out.report;
  for (const char* key : {"phase_total_direct", "phase_total_formula", "phase_geometric", "phase_dynamic",
                          "residual", "period", "mu", "h_mu", "method"}) {
    EXPECT_TRUE(r.contains(key)) << key;
  }
  EXPECT_EQ(r["method"].size(), r["residual"].size());
  EXPECT_EQ(r["method"][0], "solid_angle");
}

TEST(Commands, PhaseHeavyTopHasDiagnostics) {
  const RunOutcome out = phase(parse_config(json::parse(
      R"({"system": "heavy-top", "dt": 1e-3, "inertia": [2, 2, 1], "lagrange": {"tilt": 0.6, "spin": 4.0},
          "phase": {"samples_per_period": 4000}})")));
  EXPECT_EQ(out.exit_code, exit_code::ok);
  const auto& methods = out.report["method"];
  EXPECT_NE(std::find(methods.begin(), methods.end(), "printed_second_line"), methods.end());
  EXPECT_NE(std::find(methods.begin(), methods.end(), "canonical_one_form"), methods.end());
}

TEST(Commands, KaluzaCompareUniformField) {
  const RunOutcome out = kaluza_compare(parse_config(json::parse(
      R"({"system": "kaluza", "dt": 1e-3, "gauge": "xy", "field": {"type": "uniform", "b": [0, 0, 1]}})")));
  EXPECT_EQ(out.exit_code, exit_code::ok);
  EXPECT_LT(out.report["answer1_vs_answer2_shifted"].get<double>(), 1e-8);
  EXPECT_LT(out.report["kk_reduced_vs_lorentz"].get<double>(), 1e-8);
  EXPECT_LT(out.report["gauge_position_gap"].get<double>(), 1e-8);
}

TEST_F(Workdir, ExecuteWritesManifestOnFailure) {
  const fs::path cfg = write("broken.json", R"({"system": "rigid-body"})");
  std::stringstream log;
  EXPECT_EQ(execute("simulate", cfg, "", log), exit_code::config_error);
  const json m = json::parse(read(dir_ / "broken.manifest.json"));
  EXPECT_EQ(m["exit_code"], exit_code::config_error);
  EXPECT_EQ(m["status"], "config_error");
  EXPECT_NE(m["message"].get<std::string>().find("dt"), std::string::npos);
}

TEST_F(Workdir, ExecuteEquilibriumPhaseIsNoPeriodicOrbit) {
  const fs::path cfg = write("eq.json", R"({"system": "rigid-body", "dt": 1e-3, "initial": {"pi": [1, 0, 0]}})");
  std::stringstream log;
  EXPECT_EQ(execute("phase", cfg, "", log), exit_code::no_periodic_orbit);
  EXPECT_TRUE(fs::exists(dir_ / "eq.manifest.json"));
}

TEST_F(Workdir, ToleranceBreachExitCode) {
  const fs::path cfg = write("tight.json", R"({"system": "rigid-body", "dt": 1e-3, "inertia": [3, 2, 1],
      "initial": {"pi": [2.0, 0.3, 0.1]}, "phase": {"samples_per_period": 200},
      "tolerances": {"phase_tol": 1e-14}})");
  std::stringstream log;
  EXPECT_EQ(execute("phase", cfg, "", log), exit_code::tolerance_breach);
}

TEST_F(Workdir, ManifestEchoesConfig) {
  const fs::path cfg = write("rb.json", kRigidBody);
  std::stringstream log;
  ASSERT_EQ(execute("simulate", cfg, (dir_ / "m.json").string(), log), exit_code::ok);
  const json m = json::parse(read(dir_ / "m.json"));
  EXPECT_EQ(m["config"], json::parse(kRigidBody));
  EXPECT_EQ(m["integrator"]["name"], "rk4");
  EXPECT_EQ(m["integrator"]["dt"], 2e-3);
  EXPECT_TRUE(m.contains("drift"));
  EXPECT_TRUE(m.contains("wall_clock_seconds"));
  EXPECT_TRUE(fs::exists(dir_ / "rb.csv"));
}

TEST_F(Workdir, CliExitCodes) {
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("simulate " + write("nodt.json", R"({"system": "rigid-body"})").string()), 2);
  EXPECT_EQ(run_cli("phase " + write("eq.json", R"({"system": "rigid-body", "dt": 1e-3,
      "initial": {"pi": [1, 0, 0]}})").string()), 5);
  EXPECT_EQ(run_cli("simulate " + write("ok.json", kRigidBody).string()), 0);
  EXPECT_EQ(run_cli("simulate /nonexistent/config.json"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
}

TEST_F(Workdir, CliIsDeterministic) {
  const fs::path a = write("a.json", kRigidBody);
  const fs::path b = write("b.json", kRigidBody);
  ASSERT_EQ(run_cli("simulate " + a.string()), 0);
  ASSERT_EQ(run_cli("simulate " + b.string()), 0);
  EXPECT_EQ(read(dir_ / "a.csv"), read(dir_ / "b.csv"));
  ASSERT_EQ(run_cli("phase " + a.string()), 0);
  ASSERT_EQ(run_cli("phase " + b.string()), 0);
  EXPECT_EQ(read(dir_ / "a.report.json"), read(dir_ / "b.report.json"));
  json ma = json::parse(read(dir_ / "a.manifest.json"));
  json mb = json::parse(read(dir_ / "b.manifest.json"));
  for (json* m : {&ma, &mb}) {
    m->erase("wall_clock_seconds");
    m->erase("config_path");
    m->erase("message");
  }
  EXPECT_EQ(ma, mb);
}

TEST_F(Workdir, BatchMergesInConfigOrder) {
  write("rb.json", kRigidBody);
  const fs::path batch = write("batch.json", R"({"command": "phase", "configs": [
      "rb.json",
      {"system": "rigid-body", "dt": 1e-3, "initial": {"pi": [1, 0, 0]}},
      {"system": "kaluza", "dt": 1e-3}]})");
  std::stringstream log;
  EXPECT_EQ(execute_batch(batch, "", log), exit_code::no_periodic_orbit);
  const json results = json::parse(read(dir_ / "batch.results.json"));
  ASSERT_EQ(results.size(), 3u);
  EXPECT_EQ(results[0]["exit_code"], 0);
  EXPECT_EQ(results[1]["exit_code"], exit_code::no_periodic_orbit);
  EXPECT_EQ(results[2]["exit_code"], exit_code::config_error);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(results[i]["index"], i);
}

TEST(Selftest, PassesAndDetectsInjectedFault) {
  EXPECT_EQ(report_selftest(run_selftest(), std::cout), 0);
  SelftestOptions fault;
  fault.flip_euler_sign = true;
  std::stringstream out;
  EXPECT_EQ(report_selftest(run_selftest(fault), out), 1);
  EXPECT_NE(out.str().find("FAIL rigidbody"), std::string::npos);
}

TEST(Selftest, CliExitCodes) {
  auto run = [](const std::string& args) {
    const int status = std::system((std::string(COTRED_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  EXPECT_EQ(run("selftest"), 0);
  EXPECT_EQ(run("selftest --inject-fault euler-sign"), 1);
  EXPECT_EQ(run("selftest --inject-fault bogus"), 2);
}
