#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "emv/reference.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("emv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Exit status of the CLI run with `args` inside the scratch directory.
  int run(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" EMV_CLI_PATH "' " + args + " >out.log 2>err.log";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }

  fs::path path(const std::string& rel) const { return dir_ / rel; }

  void write(const std::string& rel, const std::string& text) const {
    fs::create_directories(path(rel).parent_path());
    std::ofstream(path(rel)) << text;
  }

  std::string slurp(const std::string& rel) const {
    std::ifstream is(path(rel));
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

// Uniform measure on [0,1] x [-0.5,0.5] x [0,1], all moments up to degree 4.
std::string lebesgue_moments() {
  auto xm = [](int b) { return b % 2 ? 0.0 : 2.0 * std::pow(0.5, b + 1) / (b + 1); };
  std::ostringstream os;
  os.precision(17);
  os << "measure nu arity 3 degree 4\n";
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b)
      for (int c = 0; a + b + c <= 4; ++c)
        os << a << ' ' << b << ' ' << c << ' ' << xm(b) / ((a + 1.0) * (c + 1.0)) << '\n';
  return os.str();
}

}  // namespace

TEST_F(Cli, OracleThenExtractRecoversShock) {
  ASSERT_EQ(run("oracle --case shock --order 4 --out-dir o"), 0);
  ASSERT_EQ(run("extract --moments o/moments_nu.txt --time 0.75 --out-dir e"), 0);

  // L1 distance recomputed from grid.csv against the closed-form profile.
  const emv::AnalyticSolution exact(emv::RiemannConfig::shock());
  std::istringstream grid(slurp("e/grid.csv"));
  std::string line;
  std::getline(grid, line);
  ASSERT_EQ(line, "t,x,y");
  double sum = 0.0;
  int n = 0;
  while (std::getline(grid, line)) {
    double t, x, y;
    char c1, c2;
    std::istringstream ls(line);
    ASSERT_TRUE(ls >> t >> c1 >> x >> c2 >> y) << line;
    sum += std::abs(y - exact(t, x));
    ++n;
  }
  EXPECT_EQ(n, 101 * 101);
  EXPECT_LE(sum / n, 0.03);

  const auto manifest = nlohmann::json::parse(slurp("e/manifest.json"));
  EXPECT_GT(manifest.at("r").get<int>(), 0);
  EXPECT_NE(slurp("e/shocks.csv").find("t,x\n0.75,"), std::string::npos);
}

TEST_F(Cli, UnknownConfigKeyIsUsageError) {
  write("bad.cfg", "bogus = 1\n");
  EXPECT_EQ(run("solve --config bad.cfg"), 2);
  EXPECT_NE(slurp("err.log").find("line 1: unknown key 'bogus'"), std::string::npos);
}

TEST_F(Cli, MissingConfigAndMissingArgumentsAreUsageErrors) {
  EXPECT_EQ(run("solve --config nowhere.cfg"), 2);
  EXPECT_EQ(run("solve"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, DiffuseMomentsAreNotConcentrated) {
  write("leb.txt", lebesgue_moments());
  EXPECT_EQ(run("extract --moments leb.txt --out-dir e"), 5);
}

TEST_F(Cli, SolveLowOrderWritesManifestAndIsReproducible) {
  write("run.cfg", "case = shock\norder = 2\n");
  ASSERT_EQ(run("solve --config run.cfg --out-dir a --write-sdp"), 0);
  ASSERT_EQ(run("solve --config run.cfg --out-dir b"), 0);

  const auto m = nlohmann::json::parse(slurp("a/manifest.json"));
  EXPECT_EQ(m.at("solver").at("status").get<std::string>(), "Optimal");
  EXPECT_TRUE(fs::exists(path("a/problem.sdp")));
  EXPECT_FALSE(fs::exists(path("a/manifest.json.tmp")));

  for (const char* f : {"moments_nu.txt", "moments_nu0.txt", "solution.txt"})
    EXPECT_EQ(slurp(std::string("a/") + f), slurp(std::string("b/") + f)) << f;

  // Moment files produced by solve feed straight into extract.
  EXPECT_EQ(run("extract --moments a/moments_nu.txt --config run.cfg --out-dir e"), 0);
}

TEST_F(Cli, CompareRejectsDomainMismatch) {
  ASSERT_EQ(run("oracle --case shock --order 2 --out-dir o"), 0);
  ASSERT_EQ(run("extract --moments o/moments_nu.txt --grid 11 --out-dir e"), 0);
  write("wide.cfg", "L = -1\nR = 1\n");
  EXPECT_EQ(run("compare --grid e/grid.csv --config wide.cfg"), 2);
  write("same.cfg", "case = shock\n");
  EXPECT_EQ(run("compare --grid e/grid.csv --config same.cfg --dx 0.01 --x 0.1 --x 0.3 --out-dir c"), 0);
  EXPECT_EQ(slurp("c/comparison.csv").substr(0, 23), "x,godunov,gmp,analytic\n");
}

TEST_F(Cli, GodunovWritesSnapshots) {
  write("run.cfg", "case = rarefaction\n");
  ASSERT_EQ(run("godunov --config run.cfg --dx 0.01 --time 0.5 --out-dir g"), 0);
  const std::string csv = slurp("g/godunov.csv");
  EXPECT_EQ(csv.substr(0, 6), "t,x,y\n");
  EXPECT_NE(csv.find("\n0.5,"), std::string::npos);
  EXPECT_NE(csv.find("\n1,"), std::string::npos);
}
