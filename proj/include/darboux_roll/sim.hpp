#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "darboux.hpp"
#include "errors.hpp"
#include "montana.hpp"
#include "rk4.hpp"

namespace darboux_roll {

enum class ModelKind {
    DarbouxS,         // arc-length domain, state' = darboux_field
    DarbouxT,         // time domain, state' = delta(t) * darboux_field
    MontanaT,         // time domain Montana equations
    EquivalencePair,  // both formulations side by side
};

[[nodiscard]] constexpr std::string_view to_string(ModelKind m) noexcept {
    switch (m) {
    case ModelKind::DarbouxS: return "darboux-s-domain";
    case ModelKind::DarbouxT: return "darboux-t-domain";
    case ModelKind::MontanaT: return "montana-t-domain";
    case ModelKind::EquivalencePair: return "equivalence-pair";
    }
    return "unknown";
}

[[nodiscard]] inline std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
    for (ModelKind m : {ModelKind::DarbouxS, ModelKind::DarbouxT, ModelKind::MontanaT,
                        ModelKind::EquivalencePair}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

/// Piecewise-constant virtual-surface inputs over arc length.
struct InputSchedule {
    struct Entry {
        double s_start = 0;
        VirtualSurfaceInputs inputs;
    };
    std::vector<Entry> entries{Entry{}};

    [[nodiscard]] static InputSchedule constant(const VirtualSurfaceInputs& v) { return {{Entry{0.0, v}}}; }

    [[nodiscard]] VirtualSurfaceInputs operator()(double s) const {
        const Entry* current = &entries.front();
        for (const auto& e : entries) {
            if (e.s_start <= s) current = &e;
        }
        return current->inputs;
    }

    [[nodiscard]] bool all_zero() const {
        return std::all_of(entries.begin(), entries.end(),
                           [](const Entry& e) { return e.inputs == VirtualSurfaceInputs{}; });
    }
};

struct Scenario {
    ModelKind model = ModelKind::DarbouxS;
    ContactState initial;
    InputSchedule inputs;
    /// Goal heading; the frame angles follow goal_angles at every evaluation.
    std::optional<GoalDirection> goal;
    /// Fixed frame angles, used instead of the goal constraint.
    std::optional<FrameAngles> fixed_angles;
    /// Declares a zero-input run; requires fixed_angles.
    bool drift_only = false;
    /// Montana only: drive with this body angular velocity instead of mapped inputs.
    std::optional<BodyAngularVelocity> omega;
    RollingRateProfile rate = RollingRateProfile::constant(1.0);
    SphereGeometry geom;
    double span = 1.0;
    double step = 1e-3;
};

struct Sample {
    double s = 0;
    double t = 0;
    ContactState state;
    VirtualSurfaceInputs inputs;
    FrameAngles angles;
    double delta = 0;
    /// atan2(dv_s, du_s); NaN while the plane contact is at rest.
    double heading = std::numeric_limits<double>::quiet_NaN();
};

struct AbortInfo {
    ErrorKind kind = ErrorKind::ChartSingularity;
    std::string message;
    /// Independent variable (s or t) of the step that failed.
    double at = 0;
};

struct Trajectory {
    std::vector<Sample> samples;
    std::string model;
    double step = 0;
    std::string scenario_hash;
    std::optional<AbortInfo> abort;

    [[nodiscard]] bool completed() const noexcept { return !abort.has_value(); }
};

/// Per-step change of a sphere angle above this rejects the step.
inline constexpr double kMaxAngleStep = 0.5;
/// Plane speed below which no heading is recorded.
inline constexpr double kHeadingSpeedTolerance = 1e-12;

using BodyRateMapping =
    std::function<BodyAngularVelocity(const RelativeCurvature&, const FrameAngles&, double delta)>;

[[nodiscard]] inline BodyRateMapping default_mapping() {
    return [](const RelativeCurvature& rel, const FrameAngles& a, double delta) {
        return sphere_angular_velocity(rel, a, delta);
    };
}

/// Largest componentwise difference, with u_o and psi compared on the circle.
[[nodiscard]] inline double state_gap(const ContactState& a, const ContactState& b) noexcept {
    return std::max({std::abs(a.u_s - b.u_s), std::abs(a.v_s - b.v_s), std::abs(angle_difference(a.u_o, b.u_o)),
                     std::abs(a.v_o - b.v_o), std::abs(angle_difference(a.psi, b.psi))});
}

[[nodiscard]] inline std::string scenario_hash(const Scenario& sc) {
    std::string canon;
    char buf[64];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g;", x);
        canon += buf;
    };
    canon += to_string(sc.model);
    canon += ';';
    for (double x : sc.initial.to_array()) put(x);
    for (const auto& e : sc.inputs.entries) {
        put(e.s_start);
        put(e.inputs.alpha_s);
        put(e.inputs.beta_s);
        put(e.inputs.gamma_s);
    }
    canon += sc.goal ? "goal;" : "nogoal;";
    if (sc.goal) put(sc.goal->g_f);
    canon += sc.fixed_angles ? "fixed;" : "free;";
    if (sc.fixed_angles) {
        put(sc.fixed_angles->theta);
        put(sc.fixed_angles->varphi);
    }
    canon += sc.drift_only ? "drift;" : "inputs;";
    canon += sc.omega ? "omega;" : "mapped;";
    if (sc.omega) {
        put(sc.omega->wx);
        put(sc.omega->wy);
        put(sc.omega->wz);
    }
    canon += sc.rate.kind == RollingRateProfile::Kind::Constant ? "const;" : "r2r;";
    put(sc.rate.value);
    put(sc.rate.peak);
    put(sc.rate.span);
    put(sc.geom.radius);
    put(sc.span);
    put(sc.step);

    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Throws KinematicsError for scenarios that cannot be run.
inline void validate(const Scenario& sc) {
    auto fail = [](const std::string& msg) { throw KinematicsError(ErrorKind::InvalidArgument, msg); };
    require_geometry(sc.geom);
    if (!(sc.step > 0.0) || !std::isfinite(sc.step)) fail("step must be positive");
    if (!(sc.span >= 0.0) || !std::isfinite(sc.span)) fail("span must be non-negative");
    for (double x : sc.initial.to_array()) {
        if (!std::isfinite(x)) fail("initial state must be finite");
    }
    require_chart(sc.initial.v_o);
    if (sc.inputs.entries.empty()) fail("input schedule is empty");
    for (std::size_t i = 1; i < sc.inputs.entries.size(); ++i) {
        if (!(sc.inputs.entries[i].s_start > sc.inputs.entries[i - 1].s_start)) {
            fail("input schedule breakpoints must increase");
        }
    }
    if (sc.rate.kind == RollingRateProfile::Kind::Constant) {
        require_rate(sc.rate.value);
    } else if (!(sc.rate.peak >= 0.0) || !(sc.rate.span > 0.0)) {
        fail("rest-to-rest profile needs peak >= 0 and span > 0");
    }
    if (sc.drift_only) {
        if (!sc.fixed_angles) fail("drift-only runs need fixed frame angles");
        if (!sc.inputs.all_zero()) fail("drift-only runs must have zero inputs");
    }
    const bool uses_angles = !(sc.model == ModelKind::MontanaT && sc.omega);
    if (sc.omega && sc.model != ModelKind::MontanaT) fail("omega input only applies to the Montana model");
    if (uses_angles && !sc.fixed_angles) {
        if (!sc.goal) fail("a goal heading or fixed frame angles is required");
        for (const auto& e : sc.inputs.entries) (void)goal_angles(e.inputs, *sc.goal, sc.geom);
    }
    if (sc.model == ModelKind::DarbouxS && sc.rate.kind != RollingRateProfile::Kind::Constant) {
        fail("arc-length runs take a constant rolling rate; use darboux-t-domain for rest-to-rest");
    }
}

/// Frame angles in force for the given inputs.
[[nodiscard]] inline FrameAngles angles_for(const Scenario& sc, const VirtualSurfaceInputs& v) {
    if (sc.fixed_angles) return *sc.fixed_angles;
    return goal_angles(v, *sc.goal, sc.geom);
}

namespace detail {

using Vec6 = std::array<double, 6>;

[[nodiscard]] inline Vec6 extend(const Vec5<double>& d, double aux) { return {d[0], d[1], d[2], d[3], d[4], aux}; }

[[nodiscard]] inline ContactState state_of(const Vec6& y) { return {y[0], y[1], y[2], y[3], y[4]}; }

[[nodiscard]] inline ContactState wrapped(const ContactState& x) {
    return {x.u_s, x.v_s, wrap_angle(x.u_o), x.v_o, wrap_angle(x.psi)};
}

[[nodiscard]] inline double heading_of(const Vec6& dy) {
    if (std::hypot(dy[0], dy[1]) > kHeadingSpeedTolerance) return std::atan2(dy[1], dy[0]);
    return std::numeric_limits<double>::quiet_NaN();
}

struct RunSpec {
    bool time_domain = false;
    double span = 0;
    double step = 0;
    Vec6 y0{};
    std::function<Vec6(double, const Vec6&)> rhs;
    /// Fills s/t/inputs/angles/delta for a sample; state and heading are set by the runner.
    std::function<void(double indep, const Vec6& y, Sample&)> describe;
};

[[nodiscard]] inline Trajectory run(const RunSpec& spec, Trajectory traj) {
    traj.samples.clear();
    if (spec.span == 0.0) return traj;

    auto n_steps = static_cast<long long>(std::ceil(spec.span / spec.step - 1e-9));
    n_steps = std::max(n_steps, 1LL);
    traj.samples.reserve(static_cast<std::size_t>(n_steps) + 1);

    auto node = [&](long long n) { return n == n_steps ? spec.span : static_cast<double>(n) * spec.step; };

    auto record = [&](double x, const Vec6& y) {
        const Vec6 dy = spec.rhs(x, y);
        Sample smp;
        spec.describe(x, y, smp);
        smp.state = wrapped(state_of(y));
        smp.heading = heading_of(dy);
        traj.samples.push_back(smp);
    };

    auto abort_with = [&](const KinematicsError& e, double x) {
        traj.abort = AbortInfo{e.kind(), e.what(), x};
    };

    Vec6 y = spec.y0;
    try {
        record(0.0, y);
    } catch (const KinematicsError& e) {
        if (e.kind() != ErrorKind::ChartSingularity) throw;
        abort_with(e, 0.0);
        return traj;
    }

    for (long long n = 1; n <= n_steps; ++n) {
        const double x0 = node(n - 1);
        const double x1 = node(n);
        try {
            const Vec6 next = rk4_step<6>(spec.rhs, x0, y, x1 - x0);
            for (std::size_t i = 2; i < 5; ++i) {
                if (!(std::abs(next[i] - y[i]) <= kMaxAngleStep)) {
                    throw KinematicsError(ErrorKind::StepTooLarge, "sphere angle changed by more than 0.5 rad in one step");
                }
            }
            require_chart(next[3]);
            record(x1, next);
            y = next;
        } catch (const KinematicsError& e) {
            if (e.kind() != ErrorKind::ChartSingularity && e.kind() != ErrorKind::StepTooLarge) throw;
            abort_with(e, x1);
            return traj;
        }
    }
    return traj;
}

[[nodiscard]] inline Trajectory blank_trajectory(const Scenario& sc, std::string_view model, double step) {
    Trajectory t;
    t.model = std::string(model);
    t.step = step;
    t.scenario_hash = scenario_hash(sc);
    return t;
}

[[nodiscard]] inline RunSpec darboux_time_spec(const Scenario& sc, double span, double step,
                                               const RollingRateProfile& rate) {
    RunSpec spec;
    spec.time_domain = true;
    spec.span = span;
    spec.step = step;
    spec.y0 = extend(sc.initial.to_array(), 0.0);
    spec.rhs = [&sc, rate](double t, const Vec6& y) {
        const double delta = rate(t);
        const VirtualSurfaceInputs v = sc.inputs(y[5]);
        Vec5<double> d = darboux_field(state_of(y), v, angles_for(sc, v), sc.geom);
        for (double& c : d) c *= delta;
        return extend(d, delta);
    };
    spec.describe = [&sc, rate](double t, const Vec6& y, Sample& smp) {
        smp.t = t;
        smp.s = y[5];
        smp.inputs = sc.inputs(y[5]);
        smp.angles = angles_for(sc, smp.inputs);
        smp.delta = rate(t);
    };
    return spec;
}

[[nodiscard]] inline RunSpec montana_mapped_spec(const Scenario& sc, double span, double step,
                                                 const RollingRateProfile& rate, BodyRateMapping mapping) {
    RunSpec spec;
    spec.time_domain = true;
    spec.span = span;
    spec.step = step;
    spec.y0 = extend(sc.initial.to_array(), 0.0);
    spec.rhs = [&sc, rate, mapping = std::move(mapping)](double t, const Vec6& y) {
        const double delta = rate(t);
        const ContactState x = state_of(y);
        const VirtualSurfaceInputs v = sc.inputs(y[5]);
        const FrameAngles a = angles_for(sc, v);
        require_chart(x.v_o);
        const RelativeCurvature rel =
            relative_curvature(sphere_induced_curvature(x, a, sc.geom), plane_induced_curvature(a), v);
        return extend(montana_field(x, mapping(rel, a, delta), sc.geom), delta);
    };
    spec.describe = [&sc, rate](double t, const Vec6& y, Sample& smp) {
        smp.t = t;
        smp.s = y[5];
        smp.inputs = sc.inputs(y[5]);
        smp.angles = angles_for(sc, smp.inputs);
        smp.delta = rate(t);
    };
    return spec;
}

/// Converts a scenario to the time-domain span, step and rate used by both
/// formulations of an equivalence run.
struct TimeGrid {
    double span, step;
    RollingRateProfile rate;
};

[[nodiscard]] inline TimeGrid time_grid(const Scenario& sc) {
    if (sc.model == ModelKind::DarbouxS) {
        const double c = sc.rate.value;
        if (!(c > 0.0)) throw KinematicsError(ErrorKind::InvalidArgument, "rolling rate must be positive");
        return {sc.span / c, sc.step / c, sc.rate};
    }
    RollingRateProfile rate = sc.rate;
    return {sc.span, sc.step, rate};
}

}  // namespace detail

/// Integrates a scenario with fixed-step RK4. Chart singularities and
/// oversized steps end the run early; the samples up to that point are kept and
/// `abort` says why.
[[nodiscard]] inline Trajectory integrate(const Scenario& sc) {
    validate(sc);
    using detail::Vec6;
    const std::string_view model = to_string(sc.model);

    switch (sc.model) {
    case ModelKind::DarbouxS: {
        detail::RunSpec spec;
        spec.span = sc.span;
        spec.step = sc.step;
        spec.y0 = detail::extend(sc.initial.to_array(), 0.0);
        spec.rhs = [&sc](double s, const Vec6& y) {
            const VirtualSurfaceInputs v = sc.inputs(s);
            return detail::extend(darboux_field(detail::state_of(y), v, angles_for(sc, v), sc.geom), 0.0);
        };
        const double c = sc.rate.value;
        spec.describe = [&sc, c](double s, const Vec6&, Sample& smp) {
            smp.s = s;
            smp.t = c > 0.0 ? s / c : std::numeric_limits<double>::quiet_NaN();
            smp.inputs = sc.inputs(s);
            smp.angles = angles_for(sc, smp.inputs);
            smp.delta = c;
        };
        return detail::run(spec, detail::blank_trajectory(sc, model, sc.step));
    }
    case ModelKind::DarbouxT:
    case ModelKind::EquivalencePair: {
        const auto grid = detail::time_grid(sc);
        return detail::run(detail::darboux_time_spec(sc, grid.span, grid.step, grid.rate),
                           detail::blank_trajectory(sc, model, grid.step));
    }
    case ModelKind::MontanaT: {
        if (!sc.omega) {
            return detail::run(detail::montana_mapped_spec(sc, sc.span, sc.step, sc.rate, default_mapping()),
                               detail::blank_trajectory(sc, model, sc.step));
        }
        detail::RunSpec spec;
        spec.time_domain = true;
        spec.span = sc.span;
        spec.step = sc.step;
        spec.y0 = detail::extend(sc.initial.to_array(), 0.0);
        const BodyAngularVelocity w = *sc.omega;
        spec.rhs = [&sc, w](double, const Vec6& y) {
            const Vec5<double> d = montana_field(detail::state_of(y), w, sc.geom);
            return detail::extend(d, std::hypot(d[0], d[1]));
        };
        spec.describe = [w, R = sc.geom.radius](double t, const Vec6& y, Sample& smp) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            smp.t = t;
            smp.s = y[5];
            smp.angles = {nan, nan};
            smp.delta = R * std::hypot(w.wx, w.wy);
        };
        return detail::run(spec, detail::blank_trajectory(sc, model, sc.step));
    }
    }
    throw KinematicsError(ErrorKind::InvalidArgument, "unknown model");
}

struct EquivalenceResult {
    Trajectory traj_darboux;
    Trajectory traj_montana_mapped;
    double max_gap = 0;
};

/// Integrates the arc-length model and the Montana model driven through the
/// angular-velocity mapping on the same time grid, and compares them.
/// `mapping` exists so tests can corrupt it.
[[nodiscard]] inline EquivalenceResult equivalence_run(const Scenario& sc,
                                                       const BodyRateMapping& mapping = default_mapping()) {
    validate(sc);
    if (sc.model == ModelKind::MontanaT && sc.omega) {
        throw KinematicsError(ErrorKind::InvalidArgument, "equivalence needs virtual-surface inputs, not omega");
    }
    const auto grid = detail::time_grid(sc);
    EquivalenceResult r;
    r.traj_darboux = detail::run(detail::darboux_time_spec(sc, grid.span, grid.step, grid.rate),
                                 detail::blank_trajectory(sc, "darboux-t-domain", grid.step));
    r.traj_montana_mapped =
        detail::run(detail::montana_mapped_spec(sc, grid.span, grid.step, grid.rate, mapping),
                    detail::blank_trajectory(sc, "montana-t-domain", grid.step));
    const std::size_t n = std::min(r.traj_darboux.samples.size(), r.traj_montana_mapped.samples.size());
    for (std::size_t i = 0; i < n; ++i) {
        r.max_gap = std::max(r.max_gap, state_gap(r.traj_darboux.samples[i].state,
                                                  r.traj_montana_mapped.samples[i].state));
    }
    if (r.traj_darboux.samples.size() != r.traj_montana_mapped.samples.size()) {
        r.max_gap = std::numeric_limits<double>::infinity();
    }
    return r;
}

// ---------------------------------------------------------------------------
// Signal helpers for the studies

/// Unwraps a sequence of angles stored in (-pi, pi].
[[nodiscard]] inline std::vector<double> unwrap(const std::vector<double>& a) {
    std::vector<double> out(a.size());
    if (a.empty()) return out;
    out[0] = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) out[i] = out[i - 1] + angle_difference(a[i], a[i - 1]);
    return out;
}

struct PeriodEstimate {
    double period = std::numeric_limits<double>::quiet_NaN();
    /// (max - min) / mean of the crossing spacings.
    double spread = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> crossings;
};

/// Period from successive upward crossings of the signal's mid-range level.
[[nodiscard]] inline PeriodEstimate estimate_period(const std::vector<double>& x, const std::vector<double>& y) {
    PeriodEstimate est;
    if (y.size() < 3) return est;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double level = 0.5 * (*lo + *hi);
    for (std::size_t i = 1; i < y.size(); ++i) {
        if (y[i - 1] < level && y[i] >= level) {
            const double frac = (level - y[i - 1]) / (y[i] - y[i - 1]);
            est.crossings.push_back(x[i - 1] + frac * (x[i] - x[i - 1]));
        }
    }
    if (est.crossings.size() < 2) return est;
    std::vector<double> gaps;
    for (std::size_t i = 1; i < est.crossings.size(); ++i) gaps.push_back(est.crossings[i] - est.crossings[i - 1]);
    double mean = 0.0;
    for (double g : gaps) mean += g;
    mean /= static_cast<double>(gaps.size());
    const auto [gmin, gmax] = std::minmax_element(gaps.begin(), gaps.end());
    est.period = mean;
    est.spread = (*gmax - *gmin) / mean;
    return est;
}

// ---------------------------------------------------------------------------
// Studies

struct Fig4Result {
    std::vector<Trajectory> trajectories;
    /// Largest |heading - G_f| over all samples of all runs.
    double max_heading_error = 0;
    /// Smallest pairwise sup-norm distance between sphere traces (u_o, v_o, psi).
    double min_pairwise_sphere_gap = std::numeric_limits<double>::infinity();
};

/// Same goal heading, different input triples: plane paths should agree in
/// heading while the sphere traces separate.
[[nodiscard]] inline Fig4Result fig4_study(const SphereGeometry& geom, double g_f,
                                           const std::vector<VirtualSurfaceInputs>& triples,
                                           const ContactState& initial = {}, double span = 5.0,
                                           double step = 1e-3) {
    Fig4Result r;
    for (const auto& v : triples) {
        Scenario sc;
        sc.model = ModelKind::DarbouxS;
        sc.initial = initial;
        sc.inputs = InputSchedule::constant(v);
        sc.goal = GoalDirection{g_f};
        sc.geom = geom;
        sc.span = span;
        sc.step = step;
        r.trajectories.push_back(integrate(sc));
    }
    for (const auto& tr : r.trajectories) {
        for (const auto& smp : tr.samples) {
            if (std::isnan(smp.heading)) continue;
            r.max_heading_error = std::max(r.max_heading_error, std::abs(angle_difference(smp.heading, g_f)));
        }
    }
    for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
        for (std::size_t j = i + 1; j < r.trajectories.size(); ++j) {
            const auto& a = r.trajectories[i].samples;
            const auto& b = r.trajectories[j].samples;
            double sup = 0.0;
            for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
                sup = std::max({sup, std::abs(angle_difference(a[k].state.u_o, b[k].state.u_o)),
                                std::abs(a[k].state.v_o - b[k].state.v_o),
                                std::abs(angle_difference(a[k].state.psi, b[k].state.psi))});
            }
            r.min_pairwise_sphere_gap = std::min(r.min_pairwise_sphere_gap, sup);
        }
    }
    return r;
}

struct Fig5Result {
    Trajectory trajectory;
    double expected_heading = M_PI / 4.0;
    double max_heading_error = 0;
    PeriodEstimate psi;
    PeriodEstimate v_o;
    /// Period of du_o/ds; u_o itself also drifts secularly.
    PeriodEstimate u_o_rate;
};

/// Drift-only run at theta+varphi = 3pi/4, varphi = 0 from the origin.
[[nodiscard]] inline Fig5Result fig5_study(const SphereGeometry& geom, double span = 20.0, double step = 1e-3) {
    Fig5Result r;
    Scenario sc;
    sc.model = ModelKind::DarbouxS;
    sc.fixed_angles = angles_from_sum(3.0 * M_PI / 4.0, 0.0);
    sc.drift_only = true;
    sc.geom = geom;
    sc.span = span;
    sc.step = step;
    r.trajectory = integrate(sc);

    const auto& smp = r.trajectory.samples;
    std::vector<double> s, psi, v_o, u_o;
    for (const auto& p : smp) {
        s.push_back(p.s);
        psi.push_back(p.state.psi);
        v_o.push_back(p.state.v_o);
        u_o.push_back(p.state.u_o);
        if (!std::isnan(p.heading)) {
            r.max_heading_error = std::max(r.max_heading_error, std::abs(angle_difference(p.heading, r.expected_heading)));
        }
    }
    r.psi = estimate_period(s, unwrap(psi));
    r.v_o = estimate_period(s, v_o);
    const std::vector<double> u = unwrap(u_o);
    std::vector<double> rate(u.size(), 0.0), s_mid(u.size(), 0.0);
    if (u.size() >= 3) {
        rate.resize(u.size() - 2);
        s_mid.resize(u.size() - 2);
        for (std::size_t i = 1; i + 1 < u.size(); ++i) {
            rate[i - 1] = (u[i + 1] - u[i - 1]) / (s[i + 1] - s[i - 1]);
            s_mid[i - 1] = s[i];
        }
        r.u_o_rate = estimate_period(s_mid, rate);
    }
    return r;
}

}  // namespace darboux_roll
