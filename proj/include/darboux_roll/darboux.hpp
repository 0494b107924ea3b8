#pragma once

#include <algorithm>
#include <cmath>

#include "diffgeo.hpp"
#include "errors.hpp"
#include "montana.hpp"

namespace darboux_roll {

/// Curvature inputs of the virtual surface sandwiched between sphere and plane:
/// geodesic curvature alpha_s (spin), geodesic torsion beta_s and normal
/// curvature gamma_s (rolling). Arc-length-domain controls, units 1/length.
struct VirtualSurfaceInputs {
    double alpha_s = 0;
    double beta_s = 0;
    double gamma_s = 0;

    friend bool operator==(const VirtualSurfaceInputs&, const VirtualSurfaceInputs&) = default;
};

/// Relative curvatures k*_g, k*_n, tau*_g seen by the Darboux frame.
struct RelativeCurvature {
    double kg_star = 0;
    double kn_star = 0;
    double taug_star = 0;
};

/// theta: angle from e^s_u to e^o_u. varphi: angle from e^o_u to the path tangent e^s_1.
struct FrameAngles {
    double theta = 0;
    double varphi = 0;

    [[nodiscard]] double sum() const noexcept { return theta + varphi; }
    friend bool operator==(const FrameAngles&, const FrameAngles&) = default;
};

/// Builds angles from the combined angle theta+varphi and varphi.
[[nodiscard]] inline FrameAngles angles_from_sum(double sum, double varphi) noexcept {
    return {sum - varphi, varphi};
}

/// Rolling rate delta = ds/dt.
///
/// `RestToRest` is a raised cosine over [0, span]: zero at both ends, `peak` in
/// the middle, and zero outside the interval.
struct RollingRateProfile {
    enum class Kind { Constant, RestToRest };

    Kind kind = Kind::Constant;
    double value = 1.0;  // Constant
    double peak = 1.0;   // RestToRest
    double span = 1.0;   // RestToRest

    [[nodiscard]] static RollingRateProfile constant(double v) { return {Kind::Constant, v, 0.0, 0.0}; }
    [[nodiscard]] static RollingRateProfile rest_to_rest(double peak, double span) {
        return {Kind::RestToRest, 0.0, peak, span};
    }

    [[nodiscard]] double operator()(double t) const noexcept {
        if (kind == Kind::Constant) return value;
        if (t <= 0.0 || t >= span) return 0.0;
        return peak * 0.5 * (1.0 - std::cos(2.0 * M_PI * t / span));
    }

    /// Arc length covered over [0, t].
    [[nodiscard]] double arc_length(double t) const noexcept {
        if (kind == Kind::Constant) return value * t;
        const double tc = std::clamp(t, 0.0, span);
        return 0.5 * peak * (tc - span / (2.0 * M_PI) * std::sin(2.0 * M_PI * tc / span));
    }
};

/// Angular velocity of the Darboux frame in the basis (e^s_1, e^s_2, e^s_3).
struct DarbouxAngularVelocity {
    double e1 = 0;
    double e2 = 0;
    double e3 = 0;
};

[[nodiscard]] inline RelativeCurvature relative_curvature(const CurvatureTriple& sphere_dir,
                                                          const CurvatureTriple& plane_dir,
                                                          const VirtualSurfaceInputs& v) noexcept {
    return {sphere_dir.k_g - plane_dir.k_g - v.alpha_s,
            sphere_dir.k_n - plane_dir.k_n - v.gamma_s,
            sphere_dir.tau_g - plane_dir.tau_g - v.beta_s};
}

inline void require_rate(double delta) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw KinematicsError(ErrorKind::InvalidArgument, "rolling rate must be finite and >= 0");
    }
}

[[nodiscard]] inline DarbouxAngularVelocity darboux_angular_velocity(const RelativeCurvature& rel,
                                                                     double delta) {
    require_rate(delta);
    return {-delta * rel.taug_star, delta * rel.kn_star, -delta * rel.kg_star};
}

/// Linear velocity of the contact point for a body whose centre sits at
/// `radius` along e^s_3: omega x (radius e_3), in the Darboux basis.
[[nodiscard]] inline Vec3 contact_point_velocity(const DarbouxAngularVelocity& w, double radius) noexcept {
    return Vec3(w.e1, w.e2, w.e3).cross(Vec3(0.0, 0.0, radius));
}

/// Sphere angular velocity in the sphere contact frame, obtained by expressing
/// the Darboux-frame rotation through the frame angles.
[[nodiscard]] inline BodyAngularVelocity sphere_angular_velocity(const RelativeCurvature& rel,
                                                                 const FrameAngles& angles,
                                                                 double delta) {
    require_rate(delta);
    const double s = std::sin(angles.sum());
    const double c = std::cos(angles.sum());
    return {delta * (-c * rel.taug_star - s * rel.kn_star),
            delta * (-s * rel.taug_star + s * rel.kn_star),
            -delta * rel.kg_star};
}

/// Induced sphere and plane curvatures along the path tangent e^s_1.
[[nodiscard]] inline CurvatureTriple sphere_induced_curvature(const ContactState& x, const FrameAngles& a,
                                                              const SphereGeometry& geom) {
    return directional_curvature(sphere_coordinate_curvatures(x.v_o, geom.radius), a.varphi);
}

[[nodiscard]] inline CurvatureTriple plane_induced_curvature(const FrameAngles& a) {
    return directional_curvature(plane_coordinate_curvatures(), a.sum());
}

template <class T>
struct DarbouxColumns {
    Vec5<T> drift;
    Vec5<T> alpha;
    Vec5<T> beta;
    Vec5<T> gamma;
};

/// Drift and input columns of the arc-length-domain model, with the frame
/// angles held fixed. Templated so it can be evaluated on dual numbers.
template <class T>
[[nodiscard]] DarbouxColumns<T> darboux_columns(const Vec5<T>& x, const FrameAngles& angles,
                                                const SphereGeometry& geom) {
    using std::cos;
    using std::sin;
    using std::tan;
    const double R = geom.radius;
    const double A = angles.sum();
    const double S = std::sin(A), C = std::cos(A);
    const double cphi = std::cos(angles.varphi);

    const T& v_o = x[3];
    const T& psi = x[4];
    const T sp = sin(psi), cp = cos(psi);
    const T cv = cos(v_o), tv = tan(v_o);
    const T s_shift = sin(psi + T(A));
    const T c_shift = cos(psi + T(A));

    DarbouxColumns<T> cols;
    cols.drift = {T(S), T(S), T(S) * (sp - cp) / (T(R) * cv), T(S) * (cp + sp) / T(R),
                  tv * (T(S) * (sp - cp) + T(cphi)) / T(R)};
    cols.alpha = {T(0.0), T(0.0), T(0.0), T(0.0), T(-1.0)};
    cols.beta = {T(R * S), T(-R * C), -s_shift / cv, -c_shift, -(tv * s_shift)};
    cols.gamma = {T(-R * S), T(-R * S), T(S) * (cp - sp) / cv, -(T(S) * (sp + cp)),
                  tv * T(S) * (cp - sp)};
    return cols;
}

/// Arc-length derivative (u'_s, v'_s, u'_o, v'_o, psi') of the contact coordinates.
[[nodiscard]] inline Vec5<double> darboux_field(const ContactState& x, const VirtualSurfaceInputs& v,
                                                const FrameAngles& angles, const SphereGeometry& geom) {
    require_chart(x.v_o);
    const auto cols = darboux_columns<double>(x.to_array(), angles, geom);
    Vec5<double> out{};
    for (std::size_t i = 0; i < 5; ++i) {
        out[i] = cols.drift[i] + cols.alpha[i] * v.alpha_s + cols.beta[i] * v.beta_s +
                 cols.gamma[i] * v.gamma_s;
    }
    return out;
}

/// Time derivative obtained the long way round: induced curvatures, relative
/// curvature, sphere angular velocity, then the Montana equations.
[[nodiscard]] inline Vec5<double> mapped_montana_field(const ContactState& x, const VirtualSurfaceInputs& v,
                                                       const FrameAngles& angles, const SphereGeometry& geom,
                                                       double delta) {
    const RelativeCurvature rel =
        relative_curvature(sphere_induced_curvature(x, angles, geom), plane_induced_curvature(angles), v);
    return montana_field(x, sphere_angular_velocity(rel, angles, delta), geom);
}

/// Branch of varphi in {0, pi} that accompanies a goal heading: pi on
/// (-3pi/4, pi/4), 0 elsewhere.
[[nodiscard]] inline double varphi_for_goal(double g_f) noexcept {
    if (-3.0 * M_PI / 4.0 < g_f && g_f < M_PI / 4.0) return M_PI;
    return 0.0;
}

namespace detail {

inline void require_beta(const VirtualSurfaceInputs& v) {
    if (v.beta_s == 0.0 || !std::isfinite(v.beta_s)) {
        throw KinematicsError(ErrorKind::ZeroBeta,
                              "beta_s must be nonzero; without the torsion input the bracket rank drops "
                              "to 4 and the model is not controllable");
    }
}

inline void require_goal(const GoalDirection& goal) {
    if (!(std::abs(std::cos(goal.g_f)) > kGoalCosTolerance)) {
        throw KinematicsError(ErrorKind::GoalTangentSingularity, "G_f too close to +-pi/2");
    }
}

}  // namespace detail

/// rho = cot(theta + varphi) for a goal heading; see goal_angles.
[[nodiscard]] inline double goal_cotangent(const VirtualSurfaceInputs& v, const GoalDirection& goal,
                                           const SphereGeometry& geom) {
    detail::require_beta(v);
    detail::require_goal(goal);
    require_geometry(geom);
    const double t = std::tan(goal.g_f);
    return ((1.0 - t) / geom.radius + v.gamma_s * (t - 1.0) - v.beta_s * t) / v.beta_s;
}

/// Frame angles that keep the plane path on heading G_f.
///
/// theta+varphi is the principal arccot in (0, pi) and varphi comes from
/// varphi_for_goal. The plane velocity then lies on the line of heading G_f;
/// it points along G_f (rather than G_f + pi) when heading_is_forward holds.
[[nodiscard]] inline FrameAngles goal_angles(const VirtualSurfaceInputs& v, const GoalDirection& goal,
                                             const SphereGeometry& geom) {
    const double rho = goal_cotangent(v, goal, geom);
    const double sum = std::atan2(1.0, rho);
    return angles_from_sum(sum, varphi_for_goal(goal.g_f));
}

[[nodiscard]] inline bool heading_is_forward(const VirtualSurfaceInputs& v, const GoalDirection& goal,
                                             const SphereGeometry& geom) noexcept {
    return (1.0 + geom.radius * (v.beta_s - v.gamma_s)) * std::cos(goal.g_f) > 0.0;
}

struct WppsReport {
    double rho = 0;
    double rho_squared = 0;
    double threshold = 0;
    bool passes = false;
};

/// Checks the sufficient condition rho^2 >> 1 under which the frame angles
/// may be treated as constant across the state space.
[[nodiscard]] inline WppsReport wpps_report(const VirtualSurfaceInputs& v, const GoalDirection& goal,
                                            const SphereGeometry& geom, double threshold = 100.0) {
    WppsReport r;
    r.rho = goal_cotangent(v, goal, geom);
    r.rho_squared = r.rho * r.rho;
    r.threshold = threshold;
    r.passes = r.rho_squared > threshold;
    return r;
}

}  // namespace darboux_roll
