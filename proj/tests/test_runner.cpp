#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "broyden_lab/errors.hpp"
#include "broyden_lab/runner.hpp"

using namespace broyden_lab;
namespace fs = std::filesystem;

namespace {

class RunnerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("broyden_lab_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("BROYDEN_LAB_SEED");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    unsetenv("BROYDEN_LAB_SEED");
  }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int run(const fs::path& cfg, const fs::path& out, int jobs = 1) {
    RunOptions opt;
    opt.jobs = jobs;
    opt.out_dir = out.string();
    std::ostringstream o, e;
    const int code = cmd_run(cfg.string(), opt, o, e);
    stdout_ = o.str();
    stderr_ = e.str();
    return code;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::string stdout_;
  std::string stderr_;
};

const char* kQuadConfig = R"({
  "name": "quad",
  "instance": {"kind": "quadratic", "n": 6, "spectrum": {"logspace": [1, 100]}},
  "method": "BFGS",
  "x0": {"random_ball": {"radius": 2.0}},
  "seed": 5
})";

}  // namespace

TEST_F(RunnerTest, SingleQuadraticWritesThreeFiles) {
  const fs::path out = dir_ / "out";
  EXPECT_EQ(run(write("c.json", kQuadConfig), out), kExitPass) << stderr_;
  EXPECT_TRUE(fs::exists(out / "trace.csv"));
  EXPECT_TRUE(fs::exists(out / "envelopes.csv"));
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  const std::string trace = slurp(out / "trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "k,lambda,g,r,xi,nu,v,psi,eig_min,eig_max,tau");
  const std::string env = slurp(out / "envelopes.csv");
  EXPECT_EQ(env.rfind("k,measured,bound_linear,bound_superlinear,satisfied_linear,"
                      "satisfied_superlinear", 0),
            0u);
  const std::string summary = slurp(out / "summary.json");
  EXPECT_NE(summary.find("\"K0\""), std::string::npos);
  EXPECT_NE(summary.find("\"first_violation\": null"), std::string::npos);
  EXPECT_NE(summary.find("\"instance_hash\""), std::string::npos);
}

TEST_F(RunnerTest, ByteIdenticalReruns) {
  const fs::path cfg = write("c.json", kQuadConfig);
  ASSERT_EQ(run(cfg, dir_ / "a"), kExitPass);
  ASSERT_EQ(run(cfg, dir_ / "b"), kExitPass);
  EXPECT_EQ(slurp(dir_ / "a" / "trace.csv"), slurp(dir_ / "b" / "trace.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "envelopes.csv"), slurp(dir_ / "b" / "envelopes.csv"));
}

TEST_F(RunnerTest, NegativeMuIsConfigErrorWithoutFiles) {
  const fs::path out = dir_ / "neg";
  const fs::path cfg = write("c.json", R"({
    "instance": {"kind": "logsumexp", "n": 3, "m": 5, "mu": -0.1},
    "method": "BFGS"})");
  EXPECT_EQ(run(cfg, out), kExitConfig);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_NE(stderr_.find("mu"), std::string::npos);
}

TEST_F(RunnerTest, MalformedConfigs) {
  EXPECT_EQ(run(write("a.json", "{not json"), dir_ / "o"), kExitConfig);
  EXPECT_EQ(run(write("b.json", R"({"instance": {"kind": "cubic", "n": 2}})"), dir_ / "o"),
            kExitConfig);
  EXPECT_EQ(run(write("c.json", R"({"instance": {"kind": "quadratic", "n": 2, "spectrum": [1, 2]},
                                    "envelopes": ["no_such"]})"),
                dir_ / "o"),
            kExitConfig);
  EXPECT_EQ(run(write("d.json", R"({"instance": {"kind": "quadratic", "n": 2, "spectrum": [1, 2]},
                                    "x0": {"random_ball": {"radius": 0}}})"),
                dir_ / "o"),
            kExitConfig);
  EXPECT_EQ(run(dir_ / "missing.json", dir_ / "o"), kExitConfig);
  // A suite with one bad entry writes nothing for the good one either.
  const std::string suite = std::string("[") + kQuadConfig +
                            R"(, {"name": "bad", "instance": {"kind": "quadratic", "n": 2, "spectrum": [1, -2]}}])";
  EXPECT_EQ(run(write("e.json", suite), dir_ / "suite"), kExitConfig);
  EXPECT_FALSE(fs::exists(dir_ / "suite"));
}

TEST_F(RunnerTest, ForcedViolationExitsOne) {
  const fs::path cfg = write("c.json", R"({
    "instance": {"kind": "quadratic", "n": 6, "spectrum": {"logspace": [1, 32]}},
    "method": "DFP",
    "envelopes": ["quad_linear", {"name": "quad_linear", "mu_scale": 31}]})");
  EXPECT_EQ(run(cfg, dir_ / "v"), kExitViolation);
  const std::string summary = slurp(dir_ / "v" / "summary.json");
  EXPECT_NE(summary.find("\"first_violation\": 1"), std::string::npos);
  const std::string env = slurp(dir_ / "v" / "envelopes.csv");
  EXPECT_NE(env.find("bound_quad_linear_mu_scale_31"), std::string::npos);
}

TEST_F(RunnerTest, SuiteRunsConcurrently) {
  const std::string suite = R"([
    {"name": "a", "instance": {"kind": "quadratic", "n": 4, "spectrum": [1, 2, 3, 4]}, "method": "BFGS"},
    {"name": "b", "instance": {"kind": "quadratic", "n": 4, "spectrum": [1, 2, 3, 4]}, "method": {"tau": 0.5}},
    {"name": "c", "instance": {"kind": "logsumexp", "n": 3, "m": 6, "mu": 0.5, "gamma": 0.5},
     "method": "DFP", "x0": {"region_fraction": 0.5}}])";
  EXPECT_EQ(run(write("s.json", suite), dir_ / "suite", 3), kExitPass) << stdout_ << stderr_;
  for (const char* name : {"a", "b", "c"}) {
    EXPECT_TRUE(fs::exists(dir_ / "suite" / name / "summary.json")) << name;
  }
  EXPECT_NE(stdout_.find("PASS c"), std::string::npos);
}

TEST_F(RunnerTest, SeedOverrideChangesInstance) {
  const fs::path cfg = write("c.json", kQuadConfig);
  ASSERT_EQ(run(cfg, dir_ / "a"), kExitPass);
  setenv("BROYDEN_LAB_SEED", "99", 1);
  ASSERT_EQ(run(cfg, dir_ / "b"), kExitPass);
  EXPECT_NE(slurp(dir_ / "a" / "trace.csv"), slurp(dir_ / "b" / "trace.csv"));
  setenv("BROYDEN_LAB_SEED", "abc", 1);
  EXPECT_EQ(run(cfg, dir_ / "c"), kExitConfig);
}

TEST_F(RunnerTest, Verify) {
  std::ostringstream o, e;
  EXPECT_EQ(cmd_verify(8, 0, 1, o, e), kExitConfig);
  EXPECT_EQ(cmd_verify(0, 10, 1, o, e), kExitConfig);
  std::ostringstream a, b;
  EXPECT_EQ(cmd_verify(4, 100, 7, a, e), kExitPass);
  EXPECT_NE(a.str().find("progress_augmented"), std::string::npos);
}

TEST_F(RunnerTest, SweepProducesOneRowPerCell) {
  const fs::path grid = write("g.json", R"({"n": [3, 5], "L_over_mu": [10, 100],
                                            "methods": ["BFGS", "DFP"], "seed": 1,
                                            "output": ")" + (dir_ / "sweep.csv").string() + "\"}");
  std::ostringstream o, e;
  EXPECT_EQ(cmd_sweep(grid.string(), o, e), kExitPass) << e.str();
  std::istringstream lines(o.str());
  std::string line;
  int rows = -1;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 8);
  EXPECT_EQ(slurp(dir_ / "sweep.csv"), o.str());
  EXPECT_NE(o.str().find("iters_to_1e-10"), std::string::npos);

  const fs::path empty = write("h.json", R"({"n": [], "L_over_mu": [10]})");
  EXPECT_EQ(cmd_sweep(empty.string(), o, e), kExitConfig);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(1e-300), "1e-300");
  EXPECT_EQ(std::stod(format_number(0.3660323412732292)), 0.3660323412732292);
}

TEST(InstanceJson, Hashable) {
  const ProblemInstance p = instance_from_json_text(
      R"({"kind": "logsumexp", "n": 2, "m": 3, "mu": 0.1,
          "a_rows": [[1, 0], [0, 1], [0.5, 0.5]], "b": [0, 1, 2]})");
  EXPECT_EQ(p.dim(), 2);
  EXPECT_NEAR(p.ell(), 1.0 + 0.1, 1e-14);
  EXPECT_THROW(instance_from_json_text(R"({"kind": "quadratic", "n": 2})"), ConfigError);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = fs::temp_directory_path() / "broyden_lab_cli";
  fs::create_directories(dir);
  const std::string cli = BROYDEN_LAB_CLI;
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " verify --trials 0 > /dev/null 2>&1").c_str())), 2);
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " verify --trials 50 > /dev/null 2>&1").c_str())), 0);
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " bogus > /dev/null 2>&1").c_str())), 2);
  fs::remove_all(dir);
}
