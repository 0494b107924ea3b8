#include <cmath>
#include <cstring>

#include "darboux_roll/sim.hpp"
#include "test_support.hpp"

using namespace darboux_roll;

namespace {

Scenario goal_scenario() {
    Scenario sc;
    sc.model = ModelKind::DarbouxS;
    sc.initial = {0.0, 0.0, 0.2, 0.1, 0.3};
    sc.inputs = InputSchedule::constant({0.2, 0.8, 0.1});
    sc.goal = GoalDirection{0.4};
    sc.span = 2.0;
    sc.step = 1e-3;
    return sc;
}

bool bit_identical(const Trajectory& a, const Trajectory& b) {
    if (a.samples.size() != b.samples.size()) return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const auto& p = a.samples[i];
        const auto& q = b.samples[i];
        const double x[] = {p.s, p.t, p.state.u_s, p.state.v_s, p.state.u_o, p.state.v_o, p.state.psi, p.delta};
        const double y[] = {q.s, q.t, q.state.u_s, q.state.v_s, q.state.u_o, q.state.v_o, q.state.psi, q.delta};
        if (std::memcmp(x, y, sizeof x) != 0) return false;
    }
    return true;
}

}  // namespace

TEST(Sim, Deterministic) {
    const Scenario sc = goal_scenario();
    const Trajectory a = integrate(sc), b = integrate(sc);
    EXPECT_TRUE(bit_identical(a, b));
    EXPECT_EQ(a.scenario_hash, b.scenario_hash);
    Scenario other = sc;
    other.step = 2e-3;
    EXPECT_NE(scenario_hash(other), a.scenario_hash);
}

TEST(Sim, SamplesEveryStepWithIncreasingArcLength) {
    const Trajectory t = integrate(goal_scenario());
    ASSERT_EQ(t.samples.size(), 2001u);
    EXPECT_TRUE(t.completed());
    EXPECT_EQ(t.samples.front().s, 0.0);
    EXPECT_EQ(t.samples.back().s, 2.0);
    for (std::size_t i = 1; i < t.samples.size(); ++i) {
        EXPECT_GT(t.samples[i].s, t.samples[i - 1].s);
        EXPECT_TRUE(chart_valid(t.samples[i].state.v_o));
        EXPECT_GT(t.samples[i].state.psi, -M_PI - 1e-12);
        EXPECT_LE(t.samples[i].state.psi, M_PI);
    }
}

TEST(Sim, GoalHeadingHeldAtEverySample) {
    const Trajectory t = integrate(goal_scenario());
    for (const auto& p : t.samples) EXPECT_NEAR(angle_difference(p.heading, 0.4), 0.0, 1e-9);
}

TEST(Sim, SpinOnlyMontana) {
    Scenario sc;
    sc.model = ModelKind::MontanaT;
    sc.initial = {0.5, -0.5, 0.2, 0.1, 0.5};
    sc.omega = BodyAngularVelocity{0.0, 0.0, 1.0};
    sc.span = 2.0;
    sc.step = 0.01;
    const Trajectory t = integrate(sc);
    ASSERT_TRUE(t.completed());
    for (const auto& p : t.samples) {
        EXPECT_NEAR(angle_difference(p.state.psi, 0.5 - p.t), 0.0, 1e-12);
        EXPECT_EQ(p.state.u_s, 0.5);
        EXPECT_EQ(p.state.v_o, 0.1);
        EXPECT_TRUE(std::isnan(p.heading));
    }
}

TEST(Sim, DriftOnlyHeading) {
    Scenario sc;
    sc.model = ModelKind::DarbouxS;
    sc.fixed_angles = angles_from_sum(3.0 * M_PI / 4.0, 0.0);
    sc.drift_only = true;
    sc.span = 5.0;
    sc.step = 1e-3;
    const Trajectory t = integrate(sc);
    for (const auto& p : t.samples) EXPECT_NEAR(p.heading, M_PI / 4.0, 1e-12);
}

TEST(Sim, ZeroLengthRun) {
    Scenario sc = goal_scenario();
    sc.span = 0.0;
    const Trajectory t = integrate(sc);
    EXPECT_TRUE(t.samples.empty());
    EXPECT_TRUE(t.completed());
}

TEST(Sim, ChartSingularityAbortKeepsPartialTrajectory) {
    Scenario sc;
    sc.model = ModelKind::MontanaT;
    sc.initial = {0, 0, 0, 1.2, 0};
    sc.omega = BodyAngularVelocity{-1.0, 0.0, 0.0};
    sc.span = 3.0;
    sc.step = 1e-3;
    const Trajectory t = integrate(sc);
    ASSERT_FALSE(t.completed());
    EXPECT_EQ(t.abort->kind, ErrorKind::ChartSingularity);
    ASSERT_FALSE(t.samples.empty());
    for (const auto& p : t.samples) EXPECT_TRUE(chart_valid(p.state.v_o));
    EXPECT_NEAR(t.abort->at, M_PI / 2.0 - 1.2, 2e-3);
}

TEST(Sim, StepTooLargeAborts) {
    Scenario sc;
    sc.model = ModelKind::MontanaT;
    sc.omega = BodyAngularVelocity{0.0, 0.0, 100.0};
    sc.span = 1.0;
    sc.step = 0.01;
    const Trajectory t = integrate(sc);
    ASSERT_FALSE(t.completed());
    EXPECT_EQ(t.abort->kind, ErrorKind::StepTooLarge);
    EXPECT_EQ(t.samples.size(), 1u);
}

TEST(Sim, ValidationErrors) {
    Scenario sc = goal_scenario();
    sc.step = 0.0;
    EXPECT_KINEMATICS_ERROR((void)integrate(sc), ErrorKind::InvalidArgument);
    sc = goal_scenario();
    sc.span = -1.0;
    EXPECT_KINEMATICS_ERROR((void)integrate(sc), ErrorKind::InvalidArgument);
    sc = goal_scenario();
    sc.inputs = InputSchedule::constant({0.2, 0.0, 0.1});
    EXPECT_KINEMATICS_ERROR((void)integrate(sc), ErrorKind::ZeroBeta);
    sc = goal_scenario();
    sc.initial.v_o = M_PI / 2.0;
    EXPECT_KINEMATICS_ERROR((void)integrate(sc), ErrorKind::ChartSingularity);
    sc = goal_scenario();
    sc.drift_only = true;
    EXPECT_KINEMATICS_ERROR((void)integrate(sc), ErrorKind::InvalidArgument);
    sc = goal_scenario();
    sc.omega = BodyAngularVelocity{1, 0, 0};
    EXPECT_KINEMATICS_ERROR((void)integrate(sc), ErrorKind::InvalidArgument);
    sc = goal_scenario();
    sc.rate = RollingRateProfile::rest_to_rest(1.0, 2.0);
    EXPECT_KINEMATICS_ERROR((void)integrate(sc), ErrorKind::InvalidArgument);
}

TEST(Sim, PiecewiseInputSchedule) {
    Scenario sc = goal_scenario();
    sc.inputs.entries = {{0.0, {0.2, 0.8, 0.1}}, {1.0, {-0.1, 1.5, 0.0}}};
    EXPECT_EQ(sc.inputs(0.5).beta_s, 0.8);
    EXPECT_EQ(sc.inputs(1.0).beta_s, 1.5);
    const Trajectory t = integrate(sc);
    EXPECT_EQ(t.samples[500].inputs.beta_s, 0.8);
    EXPECT_EQ(t.samples[1500].inputs.beta_s, 1.5);
    sc.inputs.entries = {{0.0, {0.2, 0.8, 0.1}}, {0.0, {0.2, 0.8, 0.1}}};
    EXPECT_KINEMATICS_ERROR((void)integrate(sc), ErrorKind::InvalidArgument);
}

TEST(Sim, TimeAndArcLengthAgreeForConstantRate) {
    const double c = 2.0;
    Scenario s_dom = goal_scenario();
    s_dom.rate = RollingRateProfile::constant(c);
    Scenario t_dom = s_dom;
    t_dom.model = ModelKind::DarbouxT;
    t_dom.span = s_dom.span / c;
    t_dom.step = s_dom.step / c;
    const Trajectory a = integrate(s_dom), b = integrate(t_dom);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); i += 100) {
        EXPECT_NEAR(b.samples[i].s, c * b.samples[i].t, 1e-12);
        EXPECT_NEAR(a.samples[i].t, b.samples[i].t, 1e-12);
        EXPECT_LT(state_gap(a.samples[i].state, b.samples[i].state), 1e-8);
    }
}

TEST(Sim, RestToRestMatchesArcLengthRun) {
    Scenario t_dom = goal_scenario();
    t_dom.model = ModelKind::DarbouxT;
    t_dom.rate = RollingRateProfile::rest_to_rest(2.0, 4.0);
    t_dom.span = 4.0;
    const Trajectory tt = integrate(t_dom);
    Scenario s_dom = goal_scenario();
    s_dom.span = t_dom.rate.arc_length(4.0);
    const Trajectory ts = integrate(s_dom);
    ASSERT_TRUE(tt.completed());
    EXPECT_NEAR(tt.samples.back().s, s_dom.span, 1e-9);
    EXPECT_LT(state_gap(tt.samples.back().state, ts.samples.back().state), 1e-6);
    // Near rest the whole field, drift included, is scaled towards zero.
    EXPECT_EQ(tt.samples.front().delta, 0.0);
    EXPECT_LT(state_gap(tt.samples[1].state, tt.samples[0].state), 1e-8);
    EXPECT_LT(state_gap(tt.samples.back().state, tt.samples[tt.samples.size() - 2].state), 1e-8);
}

TEST(Sim, StepHalvingConvergence) {
    const Scenario base = goal_scenario();
    auto final_state = [&](double h) {
        Scenario sc = base;
        sc.span = 4.0;
        sc.step = h;
        return integrate(sc).samples.back().state;
    };
    const ContactState ref = final_state(0.05 / 16.0);
    const double ratio = state_gap(final_state(0.05), ref) / state_gap(final_state(0.025), ref);
    EXPECT_GE(ratio, 12.0);
    EXPECT_LE(ratio, 20.0);
}

TEST(Sim, EquivalenceAndMutation) {
    Scenario sc = goal_scenario();
    sc.span = 5.0;
    sc.initial = {0.3, -0.1, 1.0, -0.3, -2.0};
    const EquivalenceResult ok = equivalence_run(sc);
    EXPECT_LT(ok.max_gap, 1e-6);
    EXPECT_EQ(ok.traj_darboux.samples.size(), ok.traj_montana_mapped.samples.size());
    const BodyRateMapping flipped = [](const RelativeCurvature& rel, const FrameAngles& a, double delta) {
        BodyAngularVelocity w = sphere_angular_velocity(rel, a, delta);
        w.wx = -w.wx;
        return w;
    };
    EXPECT_GT(equivalence_run(sc, flipped).max_gap, 0.1);
}

TEST(Sim, EquivalenceOfDriftOnlyRuns) {
    Scenario sc;
    sc.model = ModelKind::EquivalencePair;
    sc.fixed_angles = angles_from_sum(1.2, M_PI);
    sc.drift_only = true;
    sc.initial = {0, 0, 0.5, 0.3, 1.0};
    sc.span = 3.0;
    EXPECT_LT(equivalence_run(sc).max_gap, 1e-10);
}

TEST(Sim, Fig4Study) {
    const ContactState start{};
    const double g = std::atan2(1.0, 3.0);
    const Fig4Result r = fig4_study({1.0}, g, {{0.1, 1.0, 0.0}, {0.1, 0.5, 0.2}, {0.0, 2.0, -0.3}}, start);
    EXPECT_LE(r.max_heading_error, 1e-6);
    EXPECT_GT(r.min_pairwise_sphere_gap, 0.01);
    const Fig4Result dup = fig4_study({1.0}, g, {{0.1, 1.0, 0.0}, {0.1, 1.0, 0.0}}, start, 1.0);
    EXPECT_TRUE(bit_identical(dup.trajectories[0], dup.trajectories[1]));
    EXPECT_EQ(dup.min_pairwise_sphere_gap, 0.0);
    EXPECT_KINEMATICS_ERROR((void)fig4_study({1.0}, g, {{0.1, 0.0, 0.0}}, start), ErrorKind::ZeroBeta);
}

TEST(Sim, Fig5Study) {
    const Fig5Result r = fig5_study({1.0});
    EXPECT_EQ(r.max_heading_error, 0.0);
    EXPECT_LT(r.psi.spread, 0.01);
    EXPECT_NEAR(r.psi.period, 7.2189, 1e-3);
    EXPECT_NEAR(r.v_o.period, r.psi.period, 1e-3);
    EXPECT_LT(r.u_o_rate.spread, 0.01);
}

TEST(Sim, PeriodEstimate) {
    std::vector<double> x, y;
    for (int i = 0; i <= 10000; ++i) {
        x.push_back(i * 1e-3);
        y.push_back(std::sin(2.0 * M_PI * x.back() / 1.7) + 0.3);
    }
    const PeriodEstimate p = estimate_period(x, y);
    EXPECT_NEAR(p.period, 1.7, 1e-5);
    EXPECT_LT(p.spread, 1e-4);
    EXPECT_TRUE(std::isnan(estimate_period({0, 1}, {0, 1}).period));
}
