#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mfreg/cli.hpp"

using namespace mfreg;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mfreg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) { return std::string(MFREG_SAMPLES_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("mfreg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& f) const { return (dir / f).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, SingleCheckOnInput) {
  auto r = run({"--input", sample("linear.json"), "--check", "subreg", "--point", "0,0", "--L", "1.0", "--report",
                path("out.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, path("out.json") + "\n");
  auto j = json::parse(slurp(path("out.json")));
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["mode"], "input");
  ASSERT_EQ(j["results"].size(), 1u);
  EXPECT_EQ(j["results"][0]["result"]["verdict"], "holds_at_resolution");
}

TEST_F(Cli, EstimatesAndTriads) {
  auto r = run({"--input", sample("linear.json"), "--check", "estimate:subreg", "--check", "at2", "--point", "0,0",
                "--L", "0.5", "--report", path("out.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = json::parse(slurp(path("out.json")));
  EXPECT_NEAR(j["results"][0]["result"]["estimate"].get<double>(), 0.5, 1e-9);
  EXPECT_EQ(j["results"][1]["result"]["triad"], "at_type2");
}

TEST_F(Cli, FailingVerdictStillExitsZero) {
  auto r = run({"--input", sample("sqrt.json"), "--check", "clm", "--point", "0,0", "--L", "1", "--report",
                path("out.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = json::parse(slurp(path("out.json")));
  EXPECT_EQ(j["results"][0]["result"]["verdict"], "fails");
  EXPECT_FALSE(j["results"][0]["result"]["witness"].is_null());
}

TEST_F(Cli, ParametricInput) {
  auto r = run({"--input", sample("shift.json"), "--check", "calm_x_unif_p", "--check", "estimate:aubin_p_unif_x",
                "--point", "0,0,0", "--L", "1", "--report", path("out.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = json::parse(slurp(path("out.json")));
  EXPECT_EQ(j["problem_kind"], "parametric");
  EXPECT_EQ(j["results"][0]["result"]["property"], "calm_x_unif_p");
  EXPECT_NEAR(j["results"][1]["result"]["estimate"].get<double>(), 1, 1e-9);
}

TEST_F(Cli, InputErrorsLeaveNoReport) {
  for (const char* f : {"malformed.json", "schema_violation.json", "missing.json"}) {
    auto r = run({"--input", sample(f), "--check", "subreg", "--point", "0,0", "--L", "1", "--report",
                  path("out.json")});
    EXPECT_EQ(r.code, kExitInput) << f;
    EXPECT_TRUE(r.out.empty());
    EXPECT_FALSE(fs::exists(path("out.json"))) << f;
  }
}

TEST_F(Cli, ConfigErrors) {
  const std::string in = sample("linear.json");
  const std::vector<std::vector<std::string>> bad = {
      {},
      {"--input", in, "--corpus", "E1"},
      {"--corpus", "E9"},
      {"--corpus", "E1", "--N", "4"},
      {"--corpus", "E1", "--check", "subreg"},
      {"--corpus", "E1", "--resolution", "0"},
      {"--input", in, "--check", "bogus", "--point", "0,0", "--L", "1"},
      {"--input", in, "--check", "subreg", "--point", "0,0"},
      {"--input", in, "--check", "subreg", "--point", "0,0", "--L", "-1"},
      {"--input", in, "--check", "subreg", "--point", "0,a", "--L", "1"},
      {"--input", in, "--check", "subreg", "--point", "0", "--L", "1"},
      {"--input", in, "--check", "subreg", "--point", "0,1", "--L", "1"},
      {"--input", in, "--check", "calm_x_unif_p", "--point", "0,0", "--L", "1"},
      {"--input", in, "--check", "subreg", "--point", "0,0", "--L", "1", "--resolution", "0.1"},
      {"--no-such-flag"},
  };
  for (auto args : bad) {
    args.push_back("--report");
    args.push_back(path("out.json"));
    auto r = run(args);
    std::string joined;
    for (const auto& a : args) joined += a + " ";
    EXPECT_EQ(r.code, kExitConfig) << joined << "\n" << r.err;
    EXPECT_FALSE(fs::exists(path("out.json"))) << joined;
  }
}

TEST_F(Cli, UnwritableReportIsInputError) {
  auto r = run({"--input", sample("linear.json"), "--check", "subreg", "--point", "0,0", "--L", "1", "--report",
                path("no/such/dir/out.json")});
  EXPECT_EQ(r.code, kExitInput);
}

TEST_F(Cli, CorpusReportIsDeterministic) {
  const std::vector<std::string> base = {"--corpus", "E3,E6", "--resolution", "2e-2,1e-2", "--N", "5", "--seed", "7"};
  auto a = base, b = base;
  a.insert(a.end(), {"--report", path("a.json")});
  b.insert(b.end(), {"--report", path("b.json")});
  ASSERT_EQ(run(a).code, kExitOk);
  ASSERT_EQ(run(b).code, kExitOk);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  auto j = json::parse(slurp(path("a.json")));
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["config"]["seed"], 7);
  EXPECT_EQ(j["matrix"]["pass"], true);
  EXPECT_NE(j["table"].get<std::string>().find("PASS"), std::string::npos);
}

TEST_F(Cli, BinaryWritesOnlyReportPathToStdout) {
  const std::string cmd = std::string(MFREG_CLI_PATH) + " --corpus E3 --N 5 --report " + path("r.json") + " > " +
                          path("stdout.txt") + " 2> " + path("stderr.txt");
  int status = std::system(cmd.c_str());
  ASSERT_EQ(WEXITSTATUS(status), 0);
  EXPECT_EQ(slurp(path("stdout.txt")), path("r.json") + "\n");
  EXPECT_NE(slurp(path("stderr.txt")).find("running E3"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("r.json")));
}

TEST_F(Cli, BinaryExitCodes) {
  const std::string bin = MFREG_CLI_PATH;
  auto code = [&](const std::string& args) {
    int s = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  EXPECT_EQ(code("--corpus E9 --report " + path("x.json")), kExitConfig);
  EXPECT_EQ(code("--input " + sample("malformed.json") + " --check subreg --point 0,0 --L 1 --report " +
                 path("x.json")),
            kExitInput);
  EXPECT_EQ(code("--help"), kExitOk);
}
