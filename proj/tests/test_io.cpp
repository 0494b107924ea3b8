#include <cmath>
#include <cstring>
#include <sstream>

#include "darboux_roll/io.hpp"
#include "test_support.hpp"

using namespace darboux_roll;
using nlohmann::json;

namespace {

json base_doc() {
    return json::parse(R"({
        "model": "darboux-s-domain",
        "radius": 1.5,
        "initial_state": {"u_s": 0.1, "v_s": 0.2, "u_o": 0.3, "v_o": 0.4, "psi": 0.5},
        "inputs": {"alpha_s": 0.1, "beta_s": 1.0, "gamma_s": 0.2},
        "goal_heading": 0.3,
        "span": 1.0,
        "step": 0.01
    })");
}

std::vector<std::string> problems_of(const json& doc) {
    try {
        (void)io::parse_scenario(doc);
    } catch (const io::ScenarioError& e) {
        return e.problems();
    }
    return {};
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(Io, ParsesScenario) {
    const io::ScenarioFile f = io::parse_scenario(base_doc());
    ASSERT_TRUE(f.scenario);
    EXPECT_TRUE(f.has_model);
    EXPECT_EQ(f.scenario->geom.radius, 1.5);
    EXPECT_EQ(f.scenario->initial.psi, 0.5);
    EXPECT_EQ(f.scenario->inputs(0.0).beta_s, 1.0);
    EXPECT_EQ(f.scenario->goal->g_f, 0.3);
    EXPECT_EQ(f.scenario->step, 0.01);
}

TEST(Io, GoalPointBecomesHeading) {
    json doc = base_doc();
    doc.erase("goal_heading");
    doc["goal_point"] = {{"u_s", 3.1}, {"v_s", 1.2}};
    const io::ScenarioFile f = io::parse_scenario(doc);
    EXPECT_DOUBLE_EQ(f.scenario->goal->g_f, std::atan2(1.0, 3.0));
}

TEST(Io, UnknownKeysListed) {
    json doc = base_doc();
    doc["spann"] = 2;
    doc["inputs"]["delta_s"] = 1;
    const auto p = problems_of(doc);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_NE(p[0].find("spann"), std::string::npos);
    EXPECT_NE(p[1].find("inputs.delta_s"), std::string::npos);
}

TEST(Io, SchemaErrors) {
    json doc = base_doc();
    doc["inputs"]["beta_s"] = 0.0;
    auto p = problems_of(doc);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_NE(p[0].find("beta_s must be nonzero"), std::string::npos);

    doc = base_doc();
    doc["model"] = "rolling";
    EXPECT_FALSE(problems_of(doc).empty());

    doc = base_doc();
    doc["step"] = "small";
    EXPECT_FALSE(problems_of(doc).empty());

    doc = base_doc();
    doc["input_table"] = json::array({{{"s", 0}, {"beta_s", 1}}});
    EXPECT_FALSE(problems_of(doc).empty());

    doc = base_doc();
    doc["rolling_rate"] = {{"kind", "sometimes"}};
    EXPECT_FALSE(problems_of(doc).empty());

    doc = base_doc();
    doc["analyses"] = {{"fig4", {{"triples", {{0.1, 0.0, 0.2}}}}}};
    EXPECT_FALSE(problems_of(doc).empty());

    EXPECT_THROW((void)io::parse_scenario(json::array()), io::ScenarioError);
    std::istringstream broken("{\"model\": ");
    EXPECT_THROW((void)io::parse_scenario(broken), io::ScenarioError);
}

TEST(Io, AnalysisOnlyFile) {
    const json doc = json::parse(R"({"analyses": {"fig5": true, "ctrb_scan": {"sum_angles": [1.0], "varphi": [0.0], "v_o": [0.2]}}})");
    const io::ScenarioFile f = io::parse_scenario(doc);
    EXPECT_FALSE(f.has_model);
    EXPECT_TRUE(f.fig5);
    ASSERT_TRUE(f.ctrb_scan);
    EXPECT_EQ(f.ctrb_scan->v_os.size(), 1u);
}

TEST(Io, InputTableAndRates) {
    json doc = base_doc();
    doc.erase("inputs");
    doc["model"] = "darboux-t-domain";
    doc["input_table"] = json::array({{{"s", 0.0}, {"beta_s", 1.0}}, {{"s", 0.5}, {"beta_s", -1.0}}});
    doc["rolling_rate"] = {{"kind", "rest-to-rest"}, {"peak", 2.0}, {"span", 1.0}};
    const io::ScenarioFile f = io::parse_scenario(doc);
    EXPECT_EQ(f.scenario->inputs(0.7).beta_s, -1.0);
    EXPECT_EQ(f.scenario->rate.kind, RollingRateProfile::Kind::RestToRest);
    EXPECT_EQ(f.scenario->rate.peak, 2.0);
}

TEST(Io, CsvRoundTrip) {
    Scenario sc = io::parse_scenario(base_doc()).scenario.value();
    Trajectory t = integrate(sc);
    t.samples.back().heading = std::numeric_limits<double>::quiet_NaN();
    std::stringstream ss;
    io::write_trajectory_csv(ss, t);
    const std::string text = ss.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), io::kCsvHeader);
    EXPECT_EQ(text.find('\r'), std::string::npos);
    const std::vector<Sample> back = io::read_trajectory_csv(ss);
    ASSERT_EQ(back.size(), t.samples.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        const Sample& a = t.samples[i];
        const Sample& b = back[i];
        EXPECT_TRUE(same_bits(a.s, b.s) && same_bits(a.t, b.t) && same_bits(a.delta, b.delta));
        EXPECT_TRUE(a.state == b.state);
        EXPECT_TRUE(a.inputs == b.inputs);
        EXPECT_TRUE(a.angles == b.angles);
        EXPECT_TRUE(same_bits(a.heading, b.heading) || (std::isnan(a.heading) && std::isnan(b.heading)));
    }
}

TEST(Io, CsvRejectsWrongHeader) {
    std::istringstream in("s,t\n1,2\n");
    EXPECT_THROW((void)io::read_trajectory_csv(in), std::runtime_error);
}

TEST(Io, ReportIsStableAndSorted) {
    const io::CtrbScan scan{{1.0, M_PI / 2.0}, {0.0}, {0.0, 0.3, M_PI / 2.0}, 0.2};
    const json a = io::ctrb_scan_json(scan, {1.0});
    const json b = io::ctrb_scan_json(scan, {1.0});
    EXPECT_EQ(a.dump(2), b.dump(2));
    ASSERT_EQ(a.size(), 6u);
    EXPECT_EQ(a[1]["rank"], 5);
    EXPECT_TRUE(a[0]["rank"].get<int>() < 5);
    EXPECT_TRUE(a[2]["rank"].is_null());
    EXPECT_EQ(a[2]["error"], "ChartSingularity");
    std::string prev;
    for (const auto& [k, _] : a[1].items()) {
        EXPECT_LT(prev, k);
        prev = k;
    }
}

TEST(Io, PlotScriptReferencesCsv) {
    const std::string gp = io::plot_script({"trajectory.csv", "trajectory_fig4_1.csv"}, "fig4");
    EXPECT_NE(gp.find("'trajectory.csv' using 3:4"), std::string::npos);
    EXPECT_NE(gp.find("'trajectory_fig4_1.csv'"), std::string::npos);
}
