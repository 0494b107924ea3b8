#pragma once

#include <array>
#include <cmath>

#include "errors.hpp"

namespace darboux_roll {

template <class T>
using Vec5 = std::array<T, 5>;

/// Cosine of v_o must stay above this; tan(v_o) and 1/cos(v_o) blow up at the poles.
inline constexpr double kChartCosTolerance = 1e-6;
/// Goal headings with |cos G_f| at or below this make tan(G_f) unusable.
inline constexpr double kGoalCosTolerance = 1e-6;

/// Contact coordinates of the sphere-plane pair.
///
/// (u_s, v_s) locate the contact on the plane, (u_o, v_o) on the sphere, and psi
/// is the spin angle between the two contact frames.
struct ContactState {
    double u_s = 0;
    double v_s = 0;
    double u_o = 0;
    double v_o = 0;
    double psi = 0;

    [[nodiscard]] Vec5<double> to_array() const noexcept { return {u_s, v_s, u_o, v_o, psi}; }
    [[nodiscard]] static ContactState from_array(const Vec5<double>& x) noexcept {
        return {x[0], x[1], x[2], x[3], x[4]};
    }
    friend bool operator==(const ContactState&, const ContactState&) = default;
};

/// Sphere angular velocity in the sphere contact frame (e^o_u, e^o_v, e^o_3).
struct BodyAngularVelocity {
    double wx = 0;
    double wy = 0;
    double wz = 0;
};

struct SphereGeometry {
    double radius = 1.0;
};

/// Desired heading G_f of the contact path on the plane.
struct GoalDirection {
    double g_f = 0;
};

/// Wraps an angle to (-pi, pi].
[[nodiscard]] inline double wrap_angle(double a) noexcept {
    double w = std::remainder(a, 2.0 * M_PI);
    if (w <= -M_PI) w += 2.0 * M_PI;
    return w;
}

/// Signed difference a - b taken on the circle.
[[nodiscard]] inline double angle_difference(double a, double b) noexcept { return wrap_angle(a - b); }

/// v_o must lie inside (-pi/2, pi/2) and keep cos v_o above the tolerance.
[[nodiscard]] inline bool chart_valid(double v_o) noexcept {
    return std::isfinite(v_o) && std::abs(v_o) < M_PI / 2.0 && std::cos(v_o) > kChartCosTolerance;
}

inline void require_chart(double v_o) {
    if (!chart_valid(v_o)) {
        throw KinematicsError(ErrorKind::ChartSingularity, "v_o at or beyond +-pi/2 (chart singularity)");
    }
}

inline void require_geometry(const SphereGeometry& geom) {
    if (!(geom.radius > 0.0) || !std::isfinite(geom.radius)) {
        throw KinematicsError(ErrorKind::InvalidArgument, "sphere radius must be positive");
    }
}

/// Time derivative of the contact coordinates for pure rolling with spin.
[[nodiscard]] inline Vec5<double> montana_field(const ContactState& x, const BodyAngularVelocity& w,
                                                const SphereGeometry& geom) {
    require_chart(x.v_o);
    const double R = geom.radius;
    const double sp = std::sin(x.psi), cp = std::cos(x.psi);
    const double cv = std::cos(x.v_o), tv = std::tan(x.v_o);
    return {
        R * w.wy,
        -R * w.wx,
        (-sp * w.wx - cp * w.wy) / cv,
        -cp * w.wx + sp * w.wy,
        -sp * tv * w.wx - cp * tv * w.wy - w.wz,
    };
}

/// Montana model with the plane heading pinned to G_f through wx = -wy tan(G_f).
/// Only two inputs remain for the three sphere coordinates.
[[nodiscard]] inline Vec5<double> constrained_montana_field(const ContactState& x, double wy, double wz,
                                                            const GoalDirection& goal,
                                                            const SphereGeometry& geom) {
    if (!(std::abs(std::cos(goal.g_f)) > kGoalCosTolerance)) {
        throw KinematicsError(ErrorKind::GoalTangentSingularity, "G_f too close to +-pi/2");
    }
    return montana_field(x, {-wy * std::tan(goal.g_f), wy, wz}, geom);
}

}  // namespace darboux_roll
