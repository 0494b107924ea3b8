#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "errors.hpp"

namespace darboux_roll {

using Vec3 = Eigen::Vector3d;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double span() const noexcept { return hi - lo; }
    [[nodiscard]] bool contains_interior(double x) const noexcept { return lo < x && x < hi; }
};

/// Parametric surface patch (u, v) -> R^3.
///
/// `normal_sign` selects the unit normal: +1 takes r_u x r_v, -1 the opposite.
/// The sphere fixture points the normal at the centre, so a convex sphere has
/// positive normal curvature 1/R along every direction.
struct SurfaceChart {
    std::function<Vec3(double, double)> map;
    Interval u_range;
    Interval v_range;
    double normal_sign = 1.0;

    [[nodiscard]] Vec3 operator()(double u, double v) const { return map(u, v); }
};

/// Sphere of radius `radius` with latitude/longitude contact coordinates (u_o, v_o).
[[nodiscard]] inline SurfaceChart sphere_chart(double radius) {
    return SurfaceChart{
        [radius](double u, double v) {
            return Vec3(-radius * std::sin(u) * std::cos(v), radius * std::sin(v),
                        -radius * std::cos(u) * std::cos(v));
        },
        {-M_PI, M_PI},
        {-M_PI / 2.0, M_PI / 2.0},
        -1.0};
}

/// The contact plane z = 0 in Cartesian coordinates (u_s, v_s).
[[nodiscard]] inline SurfaceChart plane_chart(double half_extent = 10.0) {
    return SurfaceChart{[](double u, double v) { return Vec3(u, v, 0.0); },
                        {-half_extent, half_extent},
                        {-half_extent, half_extent},
                        1.0};
}

struct FiniteDifferenceOptions {
    /// Central-difference step for first partials, as a fraction of each coordinate's range.
    double relative_step = 1e-5;
    /// Step for second partials, which use five-point fourth-order stencils.
    /// Round-off there grows like eps/h^2, so the step is much larger.
    double second_relative_step = 1e-3;
    /// Charts with EG - F^2 at or below this are rejected.
    double regularity_tolerance = 1e-12;
    /// |F| must stay below this multiple of sqrt(EG) for the orthogonal-chart formulas.
    double orthogonality_tolerance = 1e-8;
};

struct SurfacePartials {
    Vec3 r_u, r_v, r_uu, r_uv, r_vv, normal;
};

struct FundamentalForms {
    double E = 0, F = 0, G = 0;
    double L = 0, M = 0, N = 0;

    [[nodiscard]] double metric_determinant() const noexcept { return E * G - F * F; }
};

/// Fundamental forms together with the first partials of E, F, G.
struct FormsWithPartials {
    FundamentalForms forms;
    double E_u = 0, E_v = 0, F_u = 0, F_v = 0, G_u = 0, G_v = 0;
};

struct GaussWeingarten {
    // Christoffel symbols, indexed as Gamma^k_ij -> gamma_k_ij.
    double gamma1_11 = 0, gamma2_11 = 0, gamma1_12 = 0, gamma2_12 = 0, gamma1_22 = 0, gamma2_22 = 0;
    // Weingarten coefficients W^j_i -> w_j_i.
    double w1_1 = 0, w2_1 = 0, w1_2 = 0, w2_2 = 0;
};

/// Geodesic curvature, normal curvature and geodesic torsion along one direction.
struct CurvatureTriple {
    double k_g = 0;
    double k_n = 0;
    double tau_g = 0;
};

/// The per-coordinate sextet: induced curvatures of the u-curve and the v-curve.
struct CoordinateCurvatures {
    CurvatureTriple u_curve;
    CurvatureTriple v_curve;
};

namespace detail {

inline void require_interior(const SurfaceChart& chart, double u, double v) {
    if (!chart.u_range.contains_interior(u) || !chart.v_range.contains_interior(v)) {
        throw KinematicsError(ErrorKind::InvalidArgument, "point outside the chart interior");
    }
}

inline void require_regular(const FundamentalForms& ff, double tol) {
    if (!(ff.metric_determinant() > tol)) {
        throw KinematicsError(ErrorKind::DegenerateChart, "EG - F^2 is not positive");
    }
}

}  // namespace detail

[[nodiscard]] inline SurfacePartials surface_partials(const SurfaceChart& chart, double u, double v,
                                                      const FiniteDifferenceOptions& opts = {}) {
    detail::require_interior(chart, u, v);
    const double hu = opts.relative_step * chart.u_range.span();
    const double hv = opts.relative_step * chart.v_range.span();

    const double ku = opts.second_relative_step * chart.u_range.span();
    const double kv = opts.second_relative_step * chart.v_range.span();

    SurfacePartials p;
    p.r_u = (chart(u + hu, v) - chart(u - hu, v)) / (2.0 * hu);
    p.r_v = (chart(u, v + hv) - chart(u, v - hv)) / (2.0 * hv);

    auto d1 = [](const auto& g, double h) -> Vec3 {
        return (-g(2.0 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2.0 * h)) / (12.0 * h);
    };
    auto d2 = [](const auto& g, double h) -> Vec3 {
        return (-g(2.0 * h) + 16.0 * g(h) - 30.0 * g(0.0) + 16.0 * g(-h) - g(-2.0 * h)) / (12.0 * h * h);
    };
    p.r_uu = d2([&](double du) -> Vec3 { return chart(u + du, v); }, ku);
    p.r_vv = d2([&](double dv) -> Vec3 { return chart(u, v + dv); }, kv);
    p.r_uv = d1(
        [&](double du) -> Vec3 {
            return d1([&](double dv) -> Vec3 { return chart(u + du, v + dv); }, kv);
        },
        ku);

    const Vec3 cross = p.r_u.cross(p.r_v);
    const double norm = cross.norm();
    if (!(norm > 0.0)) {
        throw KinematicsError(ErrorKind::DegenerateChart, "coordinate tangents are parallel");
    }
    p.normal = chart.normal_sign * cross / norm;
    return p;
}

[[nodiscard]] inline FormsWithPartials forms_from_partials(const SurfacePartials& p) {
    FormsWithPartials out;
    FundamentalForms& ff = out.forms;
    ff.E = p.r_u.dot(p.r_u);
    ff.F = p.r_u.dot(p.r_v);
    ff.G = p.r_v.dot(p.r_v);
    ff.L = p.r_uu.dot(p.normal);
    ff.M = p.r_uv.dot(p.normal);
    ff.N = p.r_vv.dot(p.normal);

    // Product rule on the metric, e.g. E_v = 2 r_u . r_uv.
    out.E_u = 2.0 * p.r_u.dot(p.r_uu);
    out.E_v = 2.0 * p.r_u.dot(p.r_uv);
    out.F_u = p.r_uu.dot(p.r_v) + p.r_u.dot(p.r_uv);
    out.F_v = p.r_uv.dot(p.r_v) + p.r_u.dot(p.r_vv);
    out.G_u = 2.0 * p.r_v.dot(p.r_uv);
    out.G_v = 2.0 * p.r_v.dot(p.r_vv);
    return out;
}

/// First and second fundamental form coefficients at an interior chart point.
[[nodiscard]] inline FundamentalForms fundamental_forms(const SurfaceChart& chart, double u, double v,
                                                        const FiniteDifferenceOptions& opts = {}) {
    FundamentalForms ff = forms_from_partials(surface_partials(chart, u, v, opts)).forms;
    detail::require_regular(ff, opts.regularity_tolerance);
    return ff;
}

[[nodiscard]] inline FormsWithPartials forms_with_partials(const SurfaceChart& chart, double u,
                                                           double v,
                                                           const FiniteDifferenceOptions& opts = {}) {
    FormsWithPartials fp = forms_from_partials(surface_partials(chart, u, v, opts));
    detail::require_regular(fp.forms, opts.regularity_tolerance);
    return fp;
}

/// Gauss and Weingarten coefficients for a general (F != 0) chart. Gamma^2_11
/// carries +F E_u and Gamma^1_22 carries -2 G G_u; both terms drop out when
/// F = 0 and the metric depends on one coordinate only.
[[nodiscard]] inline GaussWeingarten gauss_weingarten(const FormsWithPartials& fp,
                                                      double regularity_tolerance = 1e-12) {
    const auto& [E, F, G, L, M, N] = fp.forms;
    const double det = fp.forms.metric_determinant();
    if (!(det > regularity_tolerance)) {
        throw KinematicsError(ErrorKind::DegenerateChart, "EG - F^2 is not positive");
    }
    const double two_det = 2.0 * det;

    GaussWeingarten gw;
    gw.gamma1_11 = (G * fp.E_u - 2.0 * F * fp.F_u + F * fp.E_v) / two_det;
    gw.gamma2_11 = (2.0 * E * fp.F_u - E * fp.E_v + F * fp.E_u) / two_det;
    gw.gamma1_12 = (G * fp.E_v - F * fp.G_u) / two_det;
    gw.gamma2_12 = (E * fp.G_u - F * fp.E_v) / two_det;
    gw.gamma1_22 = (2.0 * G * fp.F_v - 2.0 * G * fp.G_u - F * fp.G_v) / two_det;
    gw.gamma2_22 = (E * fp.G_v - 2.0 * F * fp.F_v + F * fp.G_u) / two_det;

    gw.w1_1 = (M * F - L * G) / det;
    gw.w2_1 = (L * F - M * E) / det;
    gw.w1_2 = (N * F - M * G) / det;
    gw.w2_2 = (M * F - N * E) / det;
    return gw;
}

[[nodiscard]] inline GaussWeingarten gauss_weingarten(const SurfaceChart& chart, double u, double v,
                                                      const FiniteDifferenceOptions& opts = {}) {
    return gauss_weingarten(forms_with_partials(chart, u, v, opts), opts.regularity_tolerance);
}

/// Induced curvatures of the u- and v-coordinate curves. Requires an orthogonal
/// chart (F = 0); the v-curve uses the frame (e_v, -e_u, e_3).
[[nodiscard]] inline CoordinateCurvatures coordinate_curvatures(const FormsWithPartials& fp,
                                                                const FiniteDifferenceOptions& opts = {}) {
    const auto& ff = fp.forms;
    detail::require_regular(ff, opts.regularity_tolerance);
    const double sqrt_eg = std::sqrt(ff.E * ff.G);
    if (!(std::abs(ff.F) < opts.orthogonality_tolerance * sqrt_eg)) {
        throw KinematicsError(ErrorKind::NonOrthogonalChart, "F is not zero at this point");
    }
    CoordinateCurvatures cc;
    cc.u_curve.k_g = -fp.E_v / (2.0 * ff.E * std::sqrt(ff.G));
    cc.u_curve.k_n = ff.L / ff.E;
    cc.u_curve.tau_g = ff.M / sqrt_eg;
    cc.v_curve.k_g = fp.G_u / (2.0 * ff.G * std::sqrt(ff.E));
    cc.v_curve.k_n = ff.N / ff.G;
    cc.v_curve.tau_g = -ff.M / sqrt_eg;
    return cc;
}

[[nodiscard]] inline CoordinateCurvatures coordinate_curvatures(const SurfaceChart& chart, double u,
                                                                double v,
                                                                const FiniteDifferenceOptions& opts = {}) {
    return coordinate_curvatures(forms_from_partials(surface_partials(chart, u, v, opts)), opts);
}

/// Rotates the coordinate-curve curvatures into a tangent direction at angle
/// `phi` from e_u.
[[nodiscard]] inline CurvatureTriple directional_curvature(const CurvatureTriple& u_curve,
                                                           const CurvatureTriple& v_curve,
                                                           double phi) noexcept {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    CurvatureTriple out;
    out.k_n = u_curve.k_n * c * c + 2.0 * u_curve.tau_g * c * s + v_curve.k_n * s * s;
    out.tau_g = u_curve.tau_g * std::cos(2.0 * phi) + 0.5 * (v_curve.k_n - u_curve.k_n) * std::sin(2.0 * phi);
    out.k_g = u_curve.k_g * c + v_curve.k_g * s;
    return out;
}

[[nodiscard]] inline CurvatureTriple directional_curvature(const CoordinateCurvatures& cc,
                                                           double phi) noexcept {
    return directional_curvature(cc.u_curve, cc.v_curve, phi);
}

// Closed-form fixtures.

[[nodiscard]] inline CoordinateCurvatures sphere_coordinate_curvatures(double v_o, double radius) noexcept {
    CoordinateCurvatures cc;
    cc.u_curve = {std::tan(v_o) / radius, 1.0 / radius, 0.0};
    cc.v_curve = {0.0, 1.0 / radius, 0.0};
    return cc;
}

[[nodiscard]] inline CoordinateCurvatures plane_coordinate_curvatures() noexcept { return {}; }

/// Sphere curvatures along the direction at angle `varphi` from e^o_u.
[[nodiscard]] inline CurvatureTriple sphere_directional_closed_form(double v_o, double varphi,
                                                                   double radius) noexcept {
    return {std::tan(v_o) * std::cos(varphi) / radius, 1.0 / radius, 0.0};
}

}  // namespace darboux_roll
