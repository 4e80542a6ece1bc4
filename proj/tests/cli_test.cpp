#include "stochwave/cli.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stochwave/experiments.hpp"
#include "stochwave/report.hpp"

namespace sw = stochwave;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("stochwave_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& file, const std::string& text) {
  std::ofstream(file) << text;
  return file;
}

std::string read_file(const fs::path& file) {
  std::ifstream is(file);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(STOCHWAVE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Keeps STOCHWAVE_SEED out of tests that do not set it.
class Cli : public ::testing::Test {
 protected:
  void SetUp() override { unsetenv("STOCHWAVE_SEED"); }
  void TearDown() override { unsetenv("STOCHWAVE_SEED"); }
};

}  // namespace

TEST_F(Cli, StrongRateExample) {
  const auto c = sw::parse_config(
      {"strong-rate", "--preset", "sine_gordon_strong_white", "--samples", "200", "--seed", "42"});
  EXPECT_EQ(c.command, "strong-rate");
  EXPECT_EQ(c.preset, "sine_gordon_strong_white");
  EXPECT_EQ(c.samples, 200u);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.n_modes, 256u);
  EXPECT_EQ(c.steps, (std::vector<std::size_t>{32, 64, 128, 256}));
  EXPECT_EQ(c.schemes.size(), 3u);
  EXPECT_EQ(c.reference_steps, 2048u);
  EXPECT_FALSE(c.output_given);
}

TEST_F(Cli, Table1Defaults) {
  const auto c = sw::parse_config({"table1", "--samples", "1000", "--seed", "7"});
  EXPECT_EQ(c.preset, "sine_gordon_weak_additive");
  EXPECT_EQ(c.steps, (std::vector<std::size_t>{8, 16, 32, 64}));
  EXPECT_EQ(c.schemes, sw::all_schemes());
  EXPECT_EQ(c.seed, 7u);
  EXPECT_TRUE(c.variance_reduction);
}

TEST_F(Cli, ListsAndFlags) {
  const auto c = sw::parse_config({"weak-rate", "--schemes", "ee,cn", "--steps", "4,8",
                                   "--functional", "mode_k(2)", "--no-variance-reduction",
                                   "--no-control-variate", "--horizon", "0.5", "--threads", "2",
                                   "--no-timestamp", "--emit-plot", "--output", "out"});
  EXPECT_EQ(c.schemes, (std::vector<sw::SchemeKind>{sw::SchemeKind::ExponentialEuler,
                                                    sw::SchemeKind::CrankNicolson}));
  EXPECT_EQ(c.steps, (std::vector<std::size_t>{4, 8}));
  EXPECT_EQ(c.functional, "mode_k(2)");
  EXPECT_FALSE(c.variance_reduction);
  EXPECT_FALSE(c.control_variate);
  ASSERT_TRUE(c.horizon.has_value());
  EXPECT_EQ(*c.horizon, 0.5);
  EXPECT_EQ(c.threads, 2u);
  EXPECT_FALSE(c.timestamp);
  EXPECT_TRUE(c.emit_plot);
  EXPECT_TRUE(c.output_given);
  EXPECT_EQ(c.output, fs::path("out"));
}

TEST_F(Cli, PaperScale) {
  const auto c = sw::parse_config({"strong-rate", "--paper-scale"});
  EXPECT_EQ(c.n_modes, 1024u);
  EXPECT_EQ(c.reference_steps, 4096u);
  EXPECT_EQ(c.samples, 1000u);
  const auto d = sw::parse_config({"strong-rate", "--paper-scale", "--samples", "50"});
  EXPECT_EQ(d.samples, 50u);
}

TEST_F(Cli, UnknownFlagNamed) {
  try {
    sw::parse_config({"strong-rate", "--foo"});
    FAIL() << "expected ConfigError";
  } catch (const sw::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("--foo"), std::string::npos) << e.what();
  }
}

TEST_F(Cli, MalformedInputRejected) {
  EXPECT_THROW(sw::parse_config({}), sw::ConfigError);
  EXPECT_THROW(sw::parse_config({"integrate"}), sw::ConfigError);
  EXPECT_THROW(sw::parse_config({"strong-rate", "--samples", "many"}), sw::ConfigError);
  EXPECT_THROW(sw::parse_config({"strong-rate", "--schemes", "rk4"}), sw::ConfigError);
  EXPECT_THROW(sw::parse_config({"strong-rate", "--steps", "8,x"}), sw::ConfigError);
  EXPECT_THROW(sw::parse_config({"weak-rate", "--functional", "energy"}), sw::ConfigError);
  EXPECT_THROW(sw::parse_config({"strong-rate", "--config", "/nonexistent/stochwave.cfg"}),
               sw::ConfigError);
}

TEST_F(Cli, HelpRequested) {
  try {
    sw::parse_config({"--help"});
    FAIL() << "expected HelpRequested";
  } catch (const sw::HelpRequested& h) {
    EXPECT_NE(std::string(h.what()).find("--samples"), std::string::npos);
  }
}

TEST_F(Cli, FlagOverridesConfigFile) {
  const auto dir = scratch_dir("precedence");
  const auto cfg = write_file(dir / "run.cfg",
                              "# study settings\n"
                              "samples = 100\n"
                              "n_modes = 32\n"
                              "steps = 8, 16\n");
  const auto c = sw::parse_config({"strong-rate", "--config", cfg.string(), "--samples", "200"});
  EXPECT_EQ(c.samples, 200u);
  EXPECT_EQ(c.n_modes, 32u);
  EXPECT_EQ(c.steps, (std::vector<std::size_t>{8, 16}));
  const auto d = sw::parse_config({"strong-rate", "--config", cfg.string()});
  EXPECT_EQ(d.samples, 100u);
}

TEST_F(Cli, ConfigFileMaySetCommand) {
  const auto dir = scratch_dir("command");
  const auto cfg = write_file(dir / "run.cfg", "command = weak-rate\nseed = 9\n");
  const auto c = sw::parse_config({"--config", cfg.string()});
  EXPECT_EQ(c.command, "weak-rate");
  EXPECT_EQ(c.seed, 9u);
}

TEST_F(Cli, UnknownConfigKeyRejected) {
  const auto dir = scratch_dir("unknown_key");
  const auto cfg = write_file(dir / "run.cfg", "samples = 10\nbogus_key = 3\n");
  try {
    sw::parse_config({"strong-rate", "--config", cfg.string()});
    FAIL() << "expected ConfigError";
  } catch (const sw::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos) << e.what();
  }
  const auto bad = write_file(dir / "bad.cfg", "samples 10\n");
  EXPECT_THROW(sw::parse_config({"strong-rate", "--config", bad.string()}), sw::ConfigError);
}

TEST_F(Cli, EnvironmentSeedHasLowestPrecedence) {
  setenv("STOCHWAVE_SEED", "1234", 1);
  EXPECT_EQ(sw::parse_config({"strong-rate"}).seed, 1234u);
  EXPECT_EQ(sw::parse_config({"strong-rate", "--seed", "5"}).seed, 5u);
  const auto dir = scratch_dir("env");
  const auto cfg = write_file(dir / "run.cfg", "seed = 77\n");
  EXPECT_EQ(sw::parse_config({"strong-rate", "--config", cfg.string()}).seed, 77u);
  setenv("STOCHWAVE_SEED", "not-a-number", 1);
  EXPECT_THROW(sw::parse_config({"strong-rate"}), sw::ConfigError);
}

TEST_F(Cli, StrongRateWritesFittedCsv) {
  const auto dir = scratch_dir("strong");
  auto c = sw::parse_config({"strong-rate", "--n-modes", "16", "--steps", "8,16,32", "--ref-steps",
                             "128", "--samples", "6", "--no-timestamp", "--emit-plot", "--output",
                             dir.string()});
  std::ostringstream out, err;
  ASSERT_EQ(sw::run(c, out, err), 0) << err.str();
  const auto csv = dir / "strong_sine_gordon_strong_white.csv";
  ASSERT_TRUE(fs::exists(csv));
  EXPECT_TRUE(fs::exists(dir / "strong_sine_gordon_strong_white.gp"));
  std::ifstream is(csv);
  const auto rows = sw::read_rate_csv(is);
  ASSERT_EQ(rows.size(), 9u);
  for (auto scheme : sw::all_schemes()) {
    std::vector<double> taus, errors;
    double fitted = 0.0;
    for (const auto& row : rows) {
      if (row.scheme != sw::scheme_name(scheme)) continue;
      taus.push_back(row.tau);
      errors.push_back(row.error);
      fitted = row.fitted_rate;
    }
    EXPECT_NEAR(fitted, sw::fit_rate(taus, errors).slope, 1e-12);
  }
  const std::string first = read_file(csv);
  std::ostringstream out2, err2;
  ASSERT_EQ(sw::run(c, out2, err2), 0);
  EXPECT_EQ(read_file(csv), first);
  fs::remove_all(dir);
}

TEST_F(Cli, Table1WritesTable) {
  const auto dir = scratch_dir("table1");
  auto c = sw::parse_config({"table1", "--n-modes", "16", "--ref-steps", "128", "--samples", "20",
                             "--no-timestamp", "--output", dir.string()});
  std::ostringstream out, err;
  ASSERT_EQ(sw::run(c, out, err), 0) << err.str();
  EXPECT_NE(out.str().find("Linear implicit Euler"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "table1.csv"));
  EXPECT_TRUE(fs::exists(dir / "weak_sine_gordon_weak_additive.csv"));
  fs::remove_all(dir);
}

TEST_F(Cli, SimulateZeroStepsReportsInitialData) {
  auto c = sw::parse_config(
      {"simulate", "--preset", "sine_gordon_weak_additive", "--steps", "0", "--n-modes", "32"});
  std::ostringstream out, err;
  EXPECT_EQ(sw::run(c, out, err), 0) << err.str();
  EXPECT_NE(out.str().find("paper_phi(u) = 5"), std::string::npos) << out.str();
}

TEST_F(Cli, SimulateWritesTrajectory) {
  const auto dir = scratch_dir("simulate");
  auto c =
      sw::parse_config({"simulate", "--n-modes", "8", "--steps", "4", "--output", dir.string()});
  std::ostringstream out, err;
  ASSERT_EQ(sw::run(c, out, err), 0) << err.str();
  const std::string csv = read_file(dir / "trajectory.csv");
  EXPECT_EQ(csv.rfind("t,mode_index,u_coeff,v_coeff\n", 0), 0u);
  fs::remove_all(dir);
}

TEST_F(Cli, UnwritableOutputFailsBeforeComputing) {
  const auto dir = scratch_dir("blocked");
  const auto blocker = write_file(dir / "file", "x");
  auto c = sw::parse_config(
      {"strong-rate", "--samples", "1000000", "--output", (blocker / "sub").string()});
  std::ostringstream out, err;
  EXPECT_EQ(sw::run(c, out, err), 1);
  EXPECT_NE(err.str().find("output directory"), std::string::npos) << err.str();
  fs::remove_all(dir);
}

TEST_F(Cli, SelftestPasses) {
  const auto c = sw::parse_config({"selftest"});
  std::ostringstream out, err;
  EXPECT_EQ(sw::run(c, out, err), 0) << out.str();
}

TEST_F(Cli, BinaryExitCodes) {
  EXPECT_EQ(run_binary("selftest"), 0);
  EXPECT_EQ(run_binary("simulate --steps 0 --n-modes 8"), 0);
  EXPECT_EQ(run_binary("--help"), 0);
  EXPECT_EQ(run_binary("strong-rate --foo"), 2);
  EXPECT_EQ(run_binary(""), 2);
}
