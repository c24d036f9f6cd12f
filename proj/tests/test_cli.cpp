#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(QGRAPH_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("qgraph_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const std::filesystem::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  std::filesystem::path dir_;
};

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

const char* kInterval = "vertices: [a, b]\nedges:\n  - {from: a, to: b, length: 3.141592653589793}\n";
const char* kHalves =
    "vertices: [a, m, b]\nedges:\n  - {from: a, to: m, length: 1.5707963267948966}\n"
    "  - {from: m, to: b, length: 1.5707963267948966}\n";

TEST_F(Cli, IntervalSpectrum) {
  const CliRun r = run("spectrum " + write("g.yaml", kInterval) + " --count 5");
  ASSERT_EQ(r.code, 0);
  const std::vector<std::string> l = lines(r.out);
  ASSERT_EQ(l.size(), 6u);
  const std::vector<std::string> expected = {"0", "1", "4", "9", "16"};
  for (int i = 0; i < 5; ++i) {
    std::istringstream row(l[i + 1]);
    int n = 0, N = 0, mult = 0;
    std::string lambda;
    row >> n >> N >> mult >> lambda;
    EXPECT_EQ(n, i + 1);
    EXPECT_EQ(N, i + 1);
    EXPECT_EQ(mult, 1);
    EXPECT_NEAR(std::stod(lambda), std::stod(expected[i]), 1e-9);
  }
}

TEST_F(Cli, ConditionsSplitTheInterval) {
  const std::string g = write("g.yaml", kHalves);
  const std::string c = write("c.yaml", "conditions:\n  - {vertex: m, type: delta, alpha: 0, t: inf}\n");
  const CliRun r = run("spectrum " + g + " --conditions " + c + " --window 0.5:10");
  ASSERT_EQ(r.code, 0);
  // Two Neumann-Dirichlet intervals of length pi / 2: (2j + 1)^2, each twice.
  const std::vector<std::string> l = lines(r.out);
  ASSERT_EQ(l.size(), 3u);
  const double expected[] = {1.0, 9.0};
  for (int i = 0; i < 2; ++i) {
    std::istringstream row(l[i + 1]);
    int n = 0, N = 0, mult = 0;
    double lambda = 0.0;
    row >> n >> N >> mult >> lambda;
    EXPECT_EQ(n, 2 * i + 1);
    EXPECT_EQ(N, 2 * i + 2);
    EXPECT_EQ(mult, 2);
    EXPECT_NEAR(lambda, expected[i], 1e-9);
  }
}

TEST_F(Cli, MalformedGraphIsAParseError) {
  EXPECT_EQ(run("spectrum " + write("g.yaml", "vertices: [a, b]\nedges: [{from: a, to: c, length: 1}]\n")).code, 2);
  EXPECT_EQ(run("spectrum " + write("h.yaml", "vertices: [a\n")).code, 2);
  EXPECT_EQ(run("spectrum /nonexistent.yaml").code, 2);
}

TEST_F(Cli, UnknownFlagIsRejected) {
  EXPECT_EQ(run("spectrum " + write("g.yaml", kInterval) + " --bogus").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("verify --theorem nonsense").code, 2);
}

TEST_F(Cli, LoopFlowCountsPoints) {
  const std::string g = write("g.yaml", kHalves);
  const CliRun r = run("sf " + g + " --set 0:0.3,1:0.6 --alpha 0.7 --mu 2.3 --interval loop");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("sf robin-map 2"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("sf tracking 2"), std::string::npos) << r.out;
}

TEST_F(Cli, IllDefinedLevel) {
  const CliRun r = run("sf " + write("g.yaml", kHalves) + " --set m --alpha 0 --mu 1");
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.out.find("try --mu"), std::string::npos);
}

TEST_F(Cli, GenericityViolation) {
  // Equal star: the second eigenvalue (pi / 2)^2 vanishes at the centre.
  const std::string g = write("g.yaml",
                              "vertices: [o, x, y, z]\nedges:\n  - {from: o, to: x, length: 1}\n"
                              "  - {from: o, to: y, length: 1}\n  - {from: o, to: z, length: 1}\n");
  EXPECT_EQ(run("robin " + g + " --eig 2 --alpha 0").code, 4);
}

TEST_F(Cli, RobinPointsOfTheInterval) {
  const CliRun r = run("robin " + write("g.yaml", kInterval) + " --eig 4 --alpha 0");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("points 3"), std::string::npos);
  EXPECT_NE(r.out.find("domains 4"), std::string::npos);
}

TEST_F(Cli, CurvesCsv) {
  const std::string out = (dir_ / "c.csv").string();
  const CliRun r = run("curves " + write("g.yaml", kHalves) + " --set m --alpha 0 --t-grid -2:2:5 --window 0:5 -o " + out);
  ASSERT_EQ(r.code, 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,branch,lambda");
}

TEST_F(Cli, VerifyIsDeterministic) {
  const std::string a = (dir_ / "a.json").string();
  const std::string b = (dir_ / "b.json").string();
  const CliRun r1 = run("verify --theorem nodal-def --trials 3 --seed 2 -o " + a);
  const CliRun r2 = run("verify --theorem nodal-def --trials 3 --seed 2 --jobs 2 -o " + b);
  ASSERT_EQ(r1.code, 0);
  ASSERT_EQ(r2.code, 0);
  std::ifstream fa(a), fb(b);
  const std::string ja((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  const std::string jb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  EXPECT_FALSE(ja.empty());
  EXPECT_EQ(ja, jb);
  EXPECT_EQ(r1.out, r2.out);
}

}  // namespace
