// Runs the psmatch executable end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "builders.hpp"
#include "psm/balance.hpp"
#include "psm/csv.hpp"
#include "psm/dataset.hpp"
#include "psm/report.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("psm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  int psmatch(const std::string& args) {
    const std::string cmd = std::string(PSMATCH_EXE) + " " + args + " >" + (dir / "stdout.txt").string() + " 2>" +
                            (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const fs::path& p) const {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  std::string stderr_text() const { return slurp(dir / "stderr.txt"); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }

  fs::path dir;
};

const char* kStrongSpec =
    "n = 4000\n"
    "seed = 11\n"
    "covariates = x1\n"
    "selection-intercept = -1.5\n"
    "selection = 1\n"
    "outcome = 1\n"
    "tau = 0\n";

}  // namespace

TEST_F(Cli, SimulateThenMatchReducesBias) {
  write("sim.cfg", kStrongSpec);
  ASSERT_EQ(psmatch("simulate --spec " + (dir / "sim.cfg").string() + " --out " + (dir / "sim.csv").string()), 0)
      << stderr_text();
  ASSERT_EQ(psmatch("--input " + (dir / "sim.csv").string() +
                    " --treatment treat --covariates x1 --id id --caliper 0.15 --seed 7 --outcomes y --out " +
                    (dir / "results").string()),
            0)
      << stderr_text();
  for (const char* f : {"report.txt", "balance_terms.csv", "pairs.csv", "run_config.txt", "data_full.csv",
                        "fig_ps_hist.svg", "fig_ps_dot.svg", "fig_smd_hist.svg", "fig_smd_dot.svg",
                        "fig_smd_line.svg"})
    EXPECT_TRUE(fs::exists(dir / "results" / f)) << f;

  const auto ds = psm::load_csv(dir / "results" / "data_full.csv", {"treat", {"x1"}, {}, "id"});
  psm::MatchResult r;
  r.weights = ds.numeric_column("_weight");
  const auto s = psm::summarize_outcome(ds, r, "y");
  EXPECT_GT(std::abs(s.d_before()), 0.3);
  EXPECT_LT(std::abs(s.d_after()), std::abs(s.d_before()));
  EXPECT_NE(slurp(dir / "stdout.txt").find("Matched"), std::string::npos);
}

TEST_F(Cli, MissingTreatmentIsAUsageError) {
  write("d.csv", "z,x1\n1,1\n0,2\n1,3\n0,5\n");
  EXPECT_EQ(psmatch("--input " + (dir / "d.csv").string() + " --covariates x1 --out " + (dir / "o").string()), 1);
  EXPECT_NE(stderr_text().find("error: category=input"), std::string::npos);
}

TEST_F(Cli, UnknownFlagIsAUsageError) {
  EXPECT_EQ(psmatch("--bogus 3"), 1);
  EXPECT_NE(stderr_text().find("code=UsageError"), std::string::npos);
  EXPECT_EQ(psmatch("simulate --out x.csv"), 1);
}

TEST_F(Cli, ErrorCategoriesMapToExitCodes) {
  write("nonbinary.csv", "z,x1\n1,1\n0,2\n2,3\n0,5\n");
  EXPECT_EQ(psmatch("--input " + (dir / "nonbinary.csv").string() + " --treatment z --covariates x1 --out " +
                    (dir / "o").string()),
            1);
  EXPECT_NE(stderr_text().find("code=NonBinaryTreatment"), std::string::npos);

  write("separated.csv", "z,x1\n0,1\n0,2\n0,3\n1,4\n1,5\n1,6\n");
  EXPECT_EQ(psmatch("--input " + (dir / "separated.csv").string() + " --treatment z --covariates x1 --out " +
                    (dir / "o").string()),
            2);
  EXPECT_NE(stderr_text().find("category=estimation code=SeparationDetected"), std::string::npos);

  // treated sit between the controls, so every control lies outside the treated score range
  write("middle.csv", "z,x1\n0,-5\n0,-4\n1,0\n1,0.5\n1,1\n0,3\n0,4\n0,6\n");
  EXPECT_EQ(psmatch("--input " + (dir / "middle.csv").string() +
                    " --treatment z --covariates x1 --discard control --out " + (dir / "o").string()),
            3);
  EXPECT_NE(stderr_text().find("category=matching code=NoControl"), std::string::npos);

  EXPECT_EQ(psmatch("--input " + (dir / "absent.csv").string() + " --treatment z --covariates x1 --out " +
                    (dir / "o").string()),
            4);
  EXPECT_NE(stderr_text().find("category=io"), std::string::npos);
}

TEST_F(Cli, ConfigFileWithFlagOverrides) {
  write("sim.cfg", "n = 300\nseed = 2\ncovariates = a, b\nselection = 0.5, -0.5\n");
  ASSERT_EQ(psmatch("simulate --spec " + (dir / "sim.cfg").string() + " --out " + (dir / "sim.csv").string()), 0);
  write("run.cfg", "input = " + (dir / "sim.csv").string() + "\ntreatment = treat\ncovariates = a,b\n" +
                       "caliper = 0.2\nseed = 5\nreport = condensed\nexport = matched\nout = " +
                       (dir / "from_file").string() + "\n");
  ASSERT_EQ(psmatch("--config " + (dir / "run.cfg").string() + " --caliper 0.15 --replace --out " +
                    (dir / "flags").string()),
            0)
      << stderr_text();
  const auto described = slurp(dir / "flags" / "run_config.txt");
  EXPECT_NE(described.find("caliper = 0.15"), std::string::npos);
  EXPECT_NE(described.find("seed = 5"), std::string::npos);
  EXPECT_NE(described.find("replace = true"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "from_file"));
  EXPECT_TRUE(fs::exists(dir / "flags" / "data_matched.csv"));
}

TEST_F(Cli, CaliperModeWithoutCaliper) {
  write("d.csv", "z,x1\n1,1\n0,2\n1,3\n0,5\n");
  EXPECT_EQ(psmatch("--input " + (dir / "d.csv").string() + " --treatment z --covariates x1 --caliper-mode nearest " +
                    "--out " + (dir / "o").string()),
            1);
  EXPECT_NE(stderr_text().find("code=InvalidConfig"), std::string::npos);
}
