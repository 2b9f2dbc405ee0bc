#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "gcan/gcan.hpp"

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" GCAN_CLI_PATH "\" " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("gcan_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const char* name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, TableOfG200) {
  const auto r = run("table 2,0,0");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line, last;
  while (std::getline(in, line)) last = line;
  // Row e12, last column e12.
  EXPECT_EQ(last.substr(last.size() - 2), "-1");
  EXPECT_EQ(lines(r.out), 6u);
  EXPECT_EQ(run("table 2,0,0").out, r.out);
}

TEST_F(Cli, TableEdgeCases) {
  EXPECT_EQ(run("table 0,0,0").out, "[[1]]\n");
  EXPECT_EQ(run("table 9,0,0").code, 2);
  EXPECT_EQ(run("table 2,x,0").code, 2);
  EXPECT_EQ(run("table").code, 2);
  EXPECT_EQ(run("table 2,0,0 --unknown").code, 2);
}

TEST_F(Cli, VerifyPassesAndReportsCounts) {
  const auto r = run("verify all");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("OK: "), std::string::npos);
  EXPECT_NE(r.out.find("PASS cayley"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST_F(Cli, VerifyDetectsCorruptedTable) {
  const auto r = run("verify cayley --fault 1,2");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL cayley"), std::string::npos);
}

TEST_F(Cli, VerifyRejectsUnknownSuite) { EXPECT_EQ(run("verify nonsense").code, 2); }

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(run("gen --n-traj 16 --seed 7 --out " + path("a.bin")).code, 0);
  ASSERT_EQ(run("gen --n-traj 16 --seed 7 --out " + path("b.bin")).code, 0);
  ASSERT_EQ(run("gen --n-traj 16 --seed 8 --out " + path("c.bin")).code, 0);
  EXPECT_EQ(slurp(path("a.bin")), slurp(path("b.bin")));
  EXPECT_NE(slurp(path("a.bin")), slurp(path("c.bin")));
  const auto d = gcan::tetris::load_dataset(path("a.bin"));
  EXPECT_EQ(d.n_traj, 16u);
  EXPECT_EQ(d.seed, 7u);
}

TEST_F(Cli, TrainWritesOneRecordPerStep) {
  ASSERT_EQ(run("gen --n-traj 32 --seed 1 --out " + path("d.bin")).code, 0);
  for (const char* model : {"gca", "mlp"}) {
    const auto r = run("train --data " + path("d.bin") + " --steps 100 --model " + model + " --checkpoint " + path("m.ckpt"));
    ASSERT_EQ(r.code, 0) << model;
    EXPECT_EQ(lines(r.out), 100u) << model;
    std::istringstream in(r.out);
    std::string first;
    std::getline(in, first);
    const auto j = nlohmann::json::parse(first);
    EXPECT_EQ(j.at("step"), 1);
    EXPECT_TRUE(j.at("train_loss").is_number());
  }
}

TEST_F(Cli, EvalAfterOverfitting) {
  ASSERT_EQ(run("gen --n-traj 8 --seed 3 --out " + path("d.bin")).code, 0);
  ASSERT_EQ(run("train --data " + path("d.bin") + " --steps 300 --lr 3e-3 --model mlp --log " + path("log.ndjson") +
                " --checkpoint " + path("m.ckpt"))
                .code,
            0);
  EXPECT_EQ(lines(slurp(path("log.ndjson"))), 300u);
  const auto r = run("eval --data " + path("d.bin") + " --checkpoint " + path("m.ckpt"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LT(j.at("mse").get<double>(), 1e-2);
  EXPECT_EQ(j.at("model"), "mlp");
}

TEST_F(Cli, VelocitiesNeedVelocityData) {
  ASSERT_EQ(run("gen --n-traj 4 --out " + path("d.bin")).code, 0);
  EXPECT_EQ(run("train --data " + path("d.bin") + " --steps 2 --velocities --checkpoint " + path("m.ckpt")).code, 2);
  ASSERT_EQ(run("gen --n-traj 4 --velocities --out " + path("v.bin")).code, 0);
  EXPECT_EQ(run("train --data " + path("v.bin") + " --steps 2 --velocities --checkpoint " + path("m.ckpt")).code, 0);
}

TEST_F(Cli, ConfigFileDefaultsAndFlagsWin) {
  {
    std::ofstream cfg(path("run.ini"));
    cfg << "[train]\nsteps=5\nmodel=mlp\ndata=" << path("d.bin") << "\ncheckpoint=" << path("m.ckpt") << "\n";
  }
  ASSERT_EQ(run("gen --n-traj 4 --out " + path("d.bin")).code, 0);
  EXPECT_EQ(lines(run("--config " + path("run.ini") + " train").out), 5u);
  EXPECT_EQ(lines(run("--config " + path("run.ini") + " train --steps 3").out), 3u);
}

TEST_F(Cli, DataDirectoryFromEnvironment) {
  const std::string env = "GCAN_DATA_DIR=\"" + dir_.string() + "\"";
  ASSERT_EQ(run("gen --n-traj 4", env).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "tetris.bin"));
  ASSERT_EQ(run("train --steps 2 --model mlp", env).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "model.ckpt"));
  EXPECT_EQ(run("eval", env).code, 0);
  EXPECT_EQ(run("eval").code, 2);
}

TEST_F(Cli, BadInputsAreUsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("train --model transformer").code, 2);
  EXPECT_EQ(run("gen --n-traj 0 --out " + path("x.bin")).code, 2);
  EXPECT_EQ(run("eval --data " + path("missing.bin") + " --checkpoint " + path("missing.ckpt")).code, 1);
}
