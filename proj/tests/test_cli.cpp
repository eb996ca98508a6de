#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "plap/config.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kBinary = PLAP_BINARY;
const std::string kConfigs = PLAP_CONFIG_DIR;

int run(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + " " + kBinary + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string capture(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + " " + kBinary + " " + args + " 2>&1";
  std::string out;
  if (FILE* p = popen(cmd.c_str(), "r")) {
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    pclose(p);
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("plap_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& name, const std::string& body) {
    const auto p = dir_ / name;
    std::ofstream(p) << body;
    return p.string();
  }
  std::string out(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, RootsPasses) {
  const auto cfg = write_config("r.json", R"({"params": {"n": 4, "p": 2, "a": 0, "mu": 0},
                                             "roots": {"trials": 500, "hardy_trials": 100}})");
  EXPECT_EQ(run("roots --config " + cfg + " --out " + out("o")), 0);
  const auto report = slurp(dir_ / "o" / "report.csv");
  EXPECT_NE(report.find("check,comparison,target,measured,tolerance,pass,note"), std::string::npos);
  EXPECT_NE(report.find("roots.gamma2,abs,2,2,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "o" / "summary.txt"));
  EXPECT_TRUE(fs::exists(dir_ / "o" / "roots_sweep.csv"));
}

TEST_F(Cli, SampleConfigsParse) {
  for (const auto& sub : plap::subcommands()) {
    const std::string cfg = kConfigs + "/" + sub + ".json";
    ASSERT_TRUE(fs::exists(cfg)) << cfg;
    EXPECT_NO_THROW(plap::ExperimentConfig::load(cfg, sub)) << sub;
  }
  // a sample config names its own subcommand
  EXPECT_THROW(plap::ExperimentConfig::load(kConfigs + "/grid.json", "roots"), plap::Error);
}

TEST_F(Cli, FailingCheckExitsOne) {
  // the e^{-r}/r translation distance at t = 160 stays near 0.09
  const auto cfg = write_config("b.json", R"({"blowup": {"radii": [0.1, 0.01], "shifts": [20, 160]}})");
  EXPECT_EQ(run("blowup --config " + cfg + " --out " + out("o")), 1);
  const auto summary = slurp(dir_ / "o" / "summary.txt");
  EXPECT_NE(summary.find("FAIL blowup.translation_final"), std::string::npos);
  EXPECT_NE(summary.find("PASS blowup.origin_exact"), std::string::npos);
}

TEST_F(Cli, ConfigAndUsageErrorsExitTwo) {
  const auto bad_p = write_config("p.json", R"({"params": {"n": 3, "p": 5}})");
  EXPECT_EQ(run("roots --config " + bad_p + " --out " + out("o")), 2);
  EXPECT_NE(capture("roots --config " + bad_p + " --out " + out("o")).find("1 < p < n"), std::string::npos);
  const auto unknown = write_config("u.json", R"({"bogus": 1})");
  EXPECT_EQ(run("roots --config " + unknown + " --out " + out("o")), 2);
  EXPECT_EQ(run("roots --config " + out("missing.json") + " --out " + out("o")), 2);
  EXPECT_EQ(run("frobnicate --config " + unknown), 2);
  EXPECT_EQ(run("roots"), 2);
  const auto ok = write_config("ok.json", "{}");
  EXPECT_EQ(run("roots --config " + ok), 2);  // no output directory
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, LogLevelEnvironment) {
  const auto cfg = write_config("r.json", R"({"roots": {"trials": 50, "hardy_trials": 20}})");
  EXPECT_EQ(run("roots --config " + cfg + " --out " + out("o"), "PLAP_LOG=verbose"), 2);
  const auto quiet = capture("roots --config " + cfg + " --out " + out("q"), "PLAP_LOG=error");
  EXPECT_EQ(quiet.find("PASS"), std::string::npos);
  const auto loud = capture("roots --config " + cfg + " --out " + out("l"), "PLAP_LOG=debug");
  EXPECT_NE(loud.find("PASS roots.sweep.max_residual"), std::string::npos);
  EXPECT_NE(loud.find("step roots.sweep started"), std::string::npos);
}

TEST_F(Cli, DeterministicAndParallelMatchesSequential) {
  const auto cfg = write_config("r.json", R"({"roots": {"trials": 300, "hardy_trials": 50},
                                             "params": {"n": 5, "p": 1.7, "a": 0.2, "mu": 0.3}})");
  ASSERT_EQ(run("roots --config " + cfg + " --out " + out("a") + " --seed 11"), 0);
  ASSERT_EQ(run("roots --config " + cfg + " --out " + out("b") + " --seed 11 --parallel"), 0);
  ASSERT_EQ(run("roots --config " + cfg + " --out " + out("c") + " --seed 12"), 0);
  for (const char* f : {"report.csv", "roots_sweep.csv", "roots_p2_oracle.csv", "hardy_sweep.csv"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  EXPECT_NE(slurp(dir_ / "a" / "roots_sweep.csv"), slurp(dir_ / "c" / "roots_sweep.csv"));
}

TEST_F(Cli, GridWritesFieldArtifacts) {
  const auto cfg = write_config("g.json", R"({"grid": {"h": [0.125, 0.0625, 0.03125]}})");
  run("grid --config " + cfg + " --out " + out("o"));
  const auto csv = slurp(dir_ / "o" / "grid_field.csv");
  EXPECT_NE(csv.find("\nx,y,v\n"), std::string::npos);
  EXPECT_EQ(fs::file_size(dir_ / "o" / "grid_field.plf2"), 4u + 8u + 24u + 8u * 33u * 33u);
}
