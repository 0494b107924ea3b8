#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string output;
};

Result run_cli(const std::string& args) {
    const std::string cmd = std::string(DARBOUX_ROLL_CLI) + " " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string scenario(const std::string& name) { return std::string(SCENARIO_DIR) + "/" + name; }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("darboux_roll_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

}  // namespace

TEST_F(Cli, Fig5WritesCsvReportAndPlot) {
    const Result r = run_cli("run " + scenario("fig5.json") + " --out " + dir_.string());
    ASSERT_EQ(r.code, 0) << r.output;
    const std::string csv = read_file(dir_ / "trajectory.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "s,t,u_s,v_s,u_o,v_o,psi,theta,varphi,delta,alpha_s,beta_s,gamma_s,heading");
    const auto report = nlohmann::json::parse(read_file(dir_ / "report.json"));
    EXPECT_LT(report["fig5"]["psi"]["spread"].get<double>(), 0.01);
    EXPECT_TRUE(fs::exists(dir_ / "plot.gp"));
}

TEST_F(Cli, ZeroBetaIsValidationError) {
    const Result r = run_cli("run " + scenario("invalid/beta_zero.json") + " --out " + dir_.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("beta_s must be nonzero"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("not controllable"), std::string::npos) << r.output;
    EXPECT_FALSE(fs::exists(dir_));
}

TEST_F(Cli, UnknownKeysAreValidationError) {
    const Result r = run_cli("run " + scenario("invalid/unknown_keys.json") + " --out " + dir_.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("spann: unknown key"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("inputs.delta_s: unknown key"), std::string::npos) << r.output;
}

TEST_F(Cli, SingularityAbortExitsThree) {
    const Result r = run_cli("run " + scenario("pole_crossing.json") + " --out " + dir_.string());
    EXPECT_EQ(r.code, 3) << r.output;
    const auto report = nlohmann::json::parse(read_file(dir_ / "report.json"));
    EXPECT_EQ(report["trajectory"]["abort"]["kind"], "ChartSingularity");
    EXPECT_TRUE(fs::file_size(dir_ / "trajectory.csv") > 100);
}

TEST_F(Cli, CtrbReport) {
    const Result r = run_cli("run " + scenario("ctrb.json") + " --out " + dir_.string());
    ASSERT_EQ(r.code, 0) << r.output;
    const auto report = nlohmann::json::parse(read_file(dir_ / "report.json"));
    const auto& pts = report["ctrb_scan"];
    ASSERT_EQ(pts.size(), 5u * 3u * 3u);
    for (const auto& p : pts) {
        EXPECT_TRUE(p.contains("rank"));
        EXPECT_TRUE(p.contains("det_numeric"));
        EXPECT_TRUE(p.contains("det_closed"));
    }
}

TEST_F(Cli, RefusesCollisionWithoutForce) {
    ASSERT_EQ(run_cli("run " + scenario("spin_only.json") + " --out " + dir_.string()).code, 0);
    const Result again = run_cli("run " + scenario("spin_only.json") + " --out " + dir_.string());
    EXPECT_EQ(again.code, 1);
    EXPECT_NE(again.output.find("--force"), std::string::npos);
    EXPECT_EQ(run_cli("run " + scenario("spin_only.json") + " --out " + dir_.string() + " --force").code, 0);
}

TEST_F(Cli, BatchWithJobsIsDeterministic) {
    const std::string files = scenario("fig4.json") + " " + scenario("equivalence.json") + " " + scenario("rest_to_rest.json");
    ASSERT_EQ(run_cli("run " + files + " --jobs 3 --out " + (dir_ / "a").string()).code, 0);
    ASSERT_EQ(run_cli("run " + files + " --jobs 1 --out " + (dir_ / "b").string()).code, 0);
    for (const char* stem : {"fig4", "equivalence", "rest_to_rest"}) {
        EXPECT_EQ(read_file(dir_ / "a" / stem / "report.json"), read_file(dir_ / "b" / stem / "report.json"));
        EXPECT_EQ(read_file(dir_ / "a" / stem / "trajectory.csv"), read_file(dir_ / "b" / stem / "trajectory.csv"));
    }
    const auto eq = nlohmann::json::parse(read_file(dir_ / "a" / "equivalence" / "report.json"));
    EXPECT_LT(eq["equivalence"]["max_gap"].get<double>(), 1e-6);
}

TEST(CliSelftest, FilterRunsOnlyMatchingCriteria) {
    const Result r = run_cli("selftest --filter diffgeo");
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("[PASS] 4 curvature-closed-forms"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("1 criteria"), std::string::npos) << r.output;
}

TEST(CliSelftest, MutatedMappingFailsEquivalence) {
    const Result r = run_cli("selftest --filter oracle --mutate-mapping");
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.output.find("[FAIL] 1 oracle-equivalence"), std::string::npos) << r.output;
}
