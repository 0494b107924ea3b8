#pragma once

#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "darboux.hpp"
#include "dual.hpp"
#include "errors.hpp"
#include "montana.hpp"

namespace darboux_roll {

using Matrix5 = Eigen::Matrix<double, 5, 5>;
using Vector5 = Eigen::Matrix<double, 5, 1>;

[[nodiscard]] inline Vector5 to_eigen(const Vec5<double>& v) { return Vector5(v.data()); }
[[nodiscard]] inline Vec5<double> from_eigen(const Vector5& v) { return {v[0], v[1], v[2], v[3], v[4]}; }

/// Singular-value ratio below which a direction counts as lost.
inline constexpr double kRankTolerance = 1e-9;

/// Which column of the arc-length model a field is.
enum class ModelField {
    Drift,  // f
    Gamma,  // g1, normal-curvature input
    Beta,   // g2, geodesic-torsion input
    Alpha,  // g3, spin input
};

/// One column of the arc-length model with the frame angles frozen.
struct VectorField5 {
    ModelField which = ModelField::Drift;
    FrameAngles angles;
    SphereGeometry geom;

    template <class T>
    [[nodiscard]] Vec5<T> operator()(const Vec5<T>& x) const {
        auto cols = darboux_columns<T>(x, angles, geom);
        switch (which) {
        case ModelField::Drift: return cols.drift;
        case ModelField::Gamma: return cols.gamma;
        case ModelField::Beta: return cols.beta;
        case ModelField::Alpha: return cols.alpha;
        }
        return cols.drift;
    }

    [[nodiscard]] std::string name() const {
        switch (which) {
        case ModelField::Drift: return "f";
        case ModelField::Gamma: return "g1";
        case ModelField::Beta: return "g2";
        case ModelField::Alpha: return "g3";
        }
        return "?";
    }
};

struct ModelFields {
    VectorField5 f, g1, g2, g3;
};

[[nodiscard]] inline ModelFields model_fields(const FrameAngles& angles, const SphereGeometry& geom) {
    return {{ModelField::Drift, angles, geom},
            {ModelField::Gamma, angles, geom},
            {ModelField::Beta, angles, geom},
            {ModelField::Alpha, angles, geom}};
}

// ---------------------------------------------------------------------------
// Finite-difference brackets

using FieldFn = std::function<Vec5<double>(const Vec5<double>&)>;

[[nodiscard]] inline FieldFn as_function(const VectorField5& field) {
    return [field](const Vec5<double>& x) { return field(x); };
}

/// Central-difference Jacobian d field / d x.
[[nodiscard]] inline Matrix5 numeric_jacobian(const FieldFn& field, const Vec5<double>& x, double h) {
    Matrix5 jac;
    for (int j = 0; j < 5; ++j) {
        Vec5<double> xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        jac.col(j) = (to_eigen(field(xp)) - to_eigen(field(xm))) / (2.0 * h);
    }
    return jac;
}

/// Lie bracket [a, b] = J_a b - J_b a with central-difference Jacobians.
[[nodiscard]] inline Vec5<double> lie_bracket(const FieldFn& a, const FieldFn& b, const ContactState& at,
                                              double h = 1e-6) {
    if (!(h > 0.0)) throw KinematicsError(ErrorKind::InvalidArgument, "step must be positive");
    require_chart(at.v_o);
    const Vec5<double> x = at.to_array();
    const Vector5 ja_b = numeric_jacobian(a, x, h) * to_eigen(b(x));
    const Vector5 jb_a = numeric_jacobian(b, x, h) * to_eigen(a(x));
    return from_eigen(ja_b - jb_a);
}

[[nodiscard]] inline Vec5<double> lie_bracket(const VectorField5& a, const VectorField5& b,
                                              const ContactState& at, double h = 1e-6) {
    return lie_bracket(as_function(a), as_function(b), at, h);
}

/// The finite-difference bracket as a field, for nesting. Use a larger outer
/// step than inner step: each nesting level divides the inner noise by h.
[[nodiscard]] inline FieldFn numeric_bracket_field(FieldFn a, FieldFn b, double h) {
    return [a = std::move(a), b = std::move(b), h](const Vec5<double>& x) {
        const Vector5 ja_b = numeric_jacobian(a, x, h) * to_eigen(b(x));
        const Vector5 jb_a = numeric_jacobian(b, x, h) * to_eigen(a(x));
        return from_eigen(ja_b - jb_a);
    };
}

// ---------------------------------------------------------------------------
// Exact brackets by nested forward-mode differentiation

inline constexpr int kMaxBracketDepth = 4;

/// A Lie monomial over the model fields: a field, or a bracket of two monomials.
class LieExpr {
public:
    LieExpr(const VectorField5& field)  // NOLINT(google-explicit-constructor)
        : node_(std::make_shared<const Node>(Node{field, nullptr, nullptr})) {}

    /// [a, b] = J_a b - J_b a.
    [[nodiscard]] static LieExpr bracket(const LieExpr& a, const LieExpr& b) {
        return LieExpr(std::make_shared<const Node>(Node{{}, a.node_, b.node_}));
    }

    [[nodiscard]] bool is_field() const noexcept { return node_->left == nullptr; }

    /// Number of nested bracket operations.
    [[nodiscard]] int depth() const noexcept { return depth_of(*node_); }

    [[nodiscard]] std::string label() const { return label_of(*node_); }

    /// Exact value at x. Requires depth() <= kMaxBracketDepth.
    template <class T>
    [[nodiscard]] Vec5<T> evaluate(const Vec5<T>& x) const {
        if (depth() > kMaxBracketDepth) {
            throw KinematicsError(ErrorKind::InvalidArgument, "bracket nesting exceeds supported depth");
        }
        return eval<kMaxBracketDepth, T>(*node_, x);
    }

private:
    struct Node {
        VectorField5 field;
        std::shared_ptr<const Node> left;
        std::shared_ptr<const Node> right;
    };

    explicit LieExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static int depth_of(const Node& n) {
        if (!n.left) return 0;
        return 1 + std::max(depth_of(*n.left), depth_of(*n.right));
    }

    static std::string label_of(const Node& n) {
        if (!n.left) return n.field.name();
        return "[" + label_of(*n.left) + "," + label_of(*n.right) + "]";
    }

    // Directional derivative of `n` at x along `dir`.
    template <int Budget, class T>
    static Vec5<Dual<T>> seeded(const Node& n, const Vec5<T>& x, const Vec5<T>& dir) {
        Vec5<Dual<T>> xd;
        for (std::size_t i = 0; i < 5; ++i) xd[i] = Dual<T>(x[i], dir[i]);
        return eval<Budget, Dual<T>>(n, xd);
    }

    template <int Budget, class T>
    static Vec5<T> eval(const Node& n, const Vec5<T>& x) {
        if (!n.left) return n.field(x);
        if constexpr (Budget == 0) {
            throw KinematicsError(ErrorKind::InvalidArgument, "bracket nesting exceeds supported depth");
        } else {
            const Vec5<T> b_x = eval<Budget - 1, T>(*n.right, x);
            const auto a_d = seeded<Budget - 1, T>(*n.left, x, b_x);
            Vec5<T> a_x;
            for (std::size_t i = 0; i < 5; ++i) a_x[i] = a_d[i].val;
            const auto b_d = seeded<Budget - 1, T>(*n.right, x, a_x);
            Vec5<T> out;
            for (std::size_t i = 0; i < 5; ++i) out[i] = a_d[i].eps - b_d[i].eps;
            return out;
        }
    }

    std::shared_ptr<const Node> node_;
};

[[nodiscard]] inline LieExpr bracket(const LieExpr& a, const LieExpr& b) { return LieExpr::bracket(a, b); }

[[nodiscard]] inline Vec5<double> exact_value(const LieExpr& e, const ContactState& at) {
    require_chart(at.v_o);
    return e.evaluate<double>(at.to_array());
}

// ---------------------------------------------------------------------------
// Closed forms

struct ClosedFormBrackets {
    Vec5<double> f_g3;    // [f, g3]
    Vec5<double> f_f_g3;  // reference [f, [f, g3]] column
};

/// Reference closed forms for the two bracket columns. The reference
/// [f,[f,g3]] column coincides with [g3,[g3,f]] = d^2 f / d psi^2; see
/// derived_drift_double_bracket for [f,[f,g3]] itself.
[[nodiscard]] inline ClosedFormBrackets closed_form_brackets(const ContactState& x, const FrameAngles& angles,
                                                             const SphereGeometry& geom) {
    require_chart(x.v_o);
    const double R = geom.radius;
    const double S = std::sin(angles.sum());
    const double sp = std::sin(x.psi), cp = std::cos(x.psi);
    const double cv = std::cos(x.v_o), tv = std::tan(x.v_o);
    ClosedFormBrackets out;
    out.f_g3 = {0.0, 0.0, -S * (cp + sp) / (R * cv), -S * (cp - sp) / R, -tv * S * (cp + sp) / R};
    out.f_f_g3 = {0.0, 0.0, S * (cp - sp) / (R * cv), -S * (cp + sp) / R, tv * S * (cp - sp) / R};
    return out;
}

/// [f, [f, g3]] worked out symbolically from the model columns.
[[nodiscard]] inline Vec5<double> derived_drift_double_bracket(const ContactState& x, const FrameAngles& angles,
                                                               const SphereGeometry& geom) {
    require_chart(x.v_o);
    const double R2 = geom.radius * geom.radius;
    const double S = std::sin(angles.sum());
    const double cphi = std::cos(angles.varphi);
    const double sp = std::sin(x.psi), cp = std::cos(x.psi);
    const double cv = std::cos(x.v_o), sv = std::sin(x.v_o), tv = std::tan(x.v_o);
    return {0.0,
            0.0,
            S * cphi * sv * (cp - sp) / (R2 * cv * cv),
            -S * cphi * tv * (sp + cp) / R2,
            S * (2.0 * S - cphi * (cp - sp)) / R2};
}

/// det{g1, g2, g3, [f,g3], [f,[f,g3]]} in closed form. The unit-radius
/// expression scales as 1/R_o.
[[nodiscard]] inline double closed_form_determinant(const ContactState& x, const FrameAngles& angles,
                                                    const SphereGeometry& geom) {
    require_chart(x.v_o);
    const double A = angles.sum();
    const double cv = std::cos(x.v_o);
    return -2.0 * std::sin(x.v_o) / (cv * cv) * std::cos(angles.varphi) * std::pow(std::sin(A), 3) *
           (std::sin(A) + std::cos(A)) / geom.radius;
}

// ---------------------------------------------------------------------------
// Rank and determinant

struct RankInfo {
    int rank = 0;
    std::vector<double> singular_values;  // descending
    double ratio = 0;                     // sigma_min / sigma_max of the leading 5
};

/// Numerical rank of the span of `columns` (5 x n) by singular-value ratio.
[[nodiscard]] inline RankInfo numerical_rank(const Eigen::Matrix<double, 5, Eigen::Dynamic>& columns,
                                             double tolerance = kRankTolerance) {
    RankInfo info;
    if (columns.cols() == 0) return info;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns);
    const auto& sv = svd.singularValues();
    info.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    if (!(smax > 0.0)) return info;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] / smax > tolerance) ++info.rank;
    }
    info.ratio = sv.size() >= 5 ? sv[4] / smax : 0.0;
    return info;
}

struct BracketReport {
    ContactState state;
    FrameAngles angles;
    Matrix5 matrix;  // columns g1, g2, g3, [f,g3], [f,[f,g3]]
    int rank = 0;
    double det_numeric = 0;
    double det_closed = 0;
    std::vector<double> singular_values;
    double singular_ratio = 0;
};

[[nodiscard]] inline std::vector<LieExpr> full_input_bracket_columns(const ModelFields& m) {
    const LieExpr f_g3 = bracket(m.f, m.g3);
    return {m.g1, m.g2, m.g3, f_g3, bracket(m.f, f_g3)};
}

[[nodiscard]] inline Eigen::Matrix<double, 5, Eigen::Dynamic> evaluate_columns(const std::vector<LieExpr>& exprs,
                                                                               const ContactState& at) {
    require_chart(at.v_o);
    Eigen::Matrix<double, 5, Eigen::Dynamic> m(5, static_cast<Eigen::Index>(exprs.size()));
    for (std::size_t j = 0; j < exprs.size(); ++j) {
        m.col(static_cast<Eigen::Index>(j)) = to_eigen(exprs[j].evaluate<double>(at.to_array()));
    }
    return m;
}

[[nodiscard]] inline BracketReport controllability_matrix(const ContactState& x, const FrameAngles& angles,
                                                          const SphereGeometry& geom) {
    require_chart(x.v_o);
    BracketReport r;
    r.state = x;
    r.angles = angles;
    r.matrix = evaluate_columns(full_input_bracket_columns(model_fields(angles, geom)), x);
    const RankInfo info = numerical_rank(r.matrix);
    r.rank = info.rank;
    r.singular_values = info.singular_values;
    r.singular_ratio = info.ratio;
    r.det_numeric = r.matrix.determinant();
    r.det_closed = closed_form_determinant(x, angles, geom);
    return r;
}

/// Generators plus all left-normed brackets [X1,[X2,...[Xk-1,Xk]]] with up to
/// `depth` bracket operations. Brackets of a field with itself are skipped.
[[nodiscard]] inline std::vector<LieExpr> left_normed_brackets(const std::vector<VectorField5>& generators,
                                                               int depth) {
    std::vector<LieExpr> all;
    std::vector<LieExpr> level;
    for (const auto& g : generators) level.emplace_back(g);
    all = level;
    for (int d = 1; d <= depth; ++d) {
        std::vector<LieExpr> next;
        for (const auto& g : generators) {
            for (const auto& y : level) {
                if (y.is_field() && y.label() == g.name()) continue;
                next.push_back(bracket(LieExpr(g), y));
            }
        }
        all.insert(all.end(), next.begin(), next.end());
        level = std::move(next);
    }
    return all;
}

/// The bracket list used to show that dropping beta_s loses a direction.
[[nodiscard]] inline std::vector<LieExpr> beta_removed_bracket_list(const ModelFields& m) {
    const LieExpr f = m.f, g1 = m.g1, g3 = m.g3;
    const LieExpr g1g3 = bracket(g1, g3), fg3 = bracket(f, g3), fg1 = bracket(f, g1);
    const LieExpr f_g1g3 = bracket(f, g1g3), f_fg3 = bracket(f, fg3), f_fg1 = bracket(f, fg1);
    const LieExpr g1_g1g3 = bracket(g1, g1g3), g1_fg3 = bracket(g1, fg3), g1_fg1 = bracket(g1, fg1);
    const LieExpr g3_g1g3 = bracket(g3, g1g3), g3_fg3 = bracket(g3, fg3), g3_fg1 = bracket(g3, fg1);
    return {g1, g3, g1g3, fg3, fg1, f_g1g3, f_fg3, f_fg1, g1_g1g3, g1_fg3, g1_fg1, g3_g1g3, g3_fg3, g3_fg1,
            bracket(f, f_g1g3), bracket(f, f_fg3), bracket(f, f_fg1), bracket(f, g1_g1g3),
            bracket(f, g1_fg3), bracket(f, g1_fg1), bracket(f, g3_g1g3), bracket(f, g3_fg3),
            bracket(f, g3_fg1)};
}

/// Rank of the Lie algebra generated by {f, g1, g3} (beta_s input removed).
[[nodiscard]] inline int rank_without_beta(const ContactState& x, const FrameAngles& angles,
                                           const SphereGeometry& geom, int bracket_depth = 3) {
    if (bracket_depth < 3 || bracket_depth > kMaxBracketDepth) {
        throw KinematicsError(ErrorKind::InvalidArgument, "bracket depth must be in [3, 4]");
    }
    const ModelFields m = model_fields(angles, geom);
    return numerical_rank(evaluate_columns(left_normed_brackets({m.f, m.g1, m.g3}, bracket_depth), x)).rank;
}

/// Rank of the Lie algebra generated by all four fields.
[[nodiscard]] inline int rank_with_all_inputs(const ContactState& x, const FrameAngles& angles,
                                              const SphereGeometry& geom, int bracket_depth = 2) {
    if (bracket_depth < 0 || bracket_depth > kMaxBracketDepth) {
        throw KinematicsError(ErrorKind::InvalidArgument, "bracket depth out of range");
    }
    const ModelFields m = model_fields(angles, geom);
    return numerical_rank(evaluate_columns(left_normed_brackets({m.f, m.g1, m.g2, m.g3}, bracket_depth), x))
        .rank;
}

// ---------------------------------------------------------------------------
// Divergence of the drift

struct DivergenceReport {
    double closed_form = 0;
    double numeric = 0;
};

[[nodiscard]] inline DivergenceReport drift_divergence(const ContactState& x, const FrameAngles& angles,
                                                       const SphereGeometry& geom, double delta,
                                                       double h = 1e-5) {
    require_chart(x.v_o);
    require_rate(delta);
    DivergenceReport r;
    r.closed_form = delta * std::sin(angles.sum()) * std::sqrt(2.0) * std::sin(x.psi + std::numbers::pi / 4) *
                    std::tan(x.v_o) / geom.radius;
    const VectorField5 f{ModelField::Drift, angles, geom};
    const Vec5<double> x0 = x.to_array();
    double div = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        Vec5<double> xp = x0, xm = x0;
        xp[i] += h;
        xm[i] -= h;
        div += (f(xp)[i] - f(xm)[i]) / (2.0 * h);
    }
    r.numeric = delta * div;
    return r;
}

// ---------------------------------------------------------------------------
// Singular loci

struct SingularCell {
    double sum_angle = 0;  // theta + varphi
    double varphi = 0;
    double v_o = 0;
    double det_closed = 0;
    /// Which factors vanish: "sin(theta+varphi)", "sin+cos", "cos(varphi)",
    /// "sin(v_o)", "chart" (cos v_o ~ 0), and "listed-half-pi" for the
    /// theta+varphi = (2k+1)pi/2 set that is listed as singular but does not
    /// zero the determinant.
    std::vector<std::string> factors;
    /// True when the cell is flagged only by the listed set, not by det = 0.
    bool listed_only = false;
};

[[nodiscard]] inline bool near_multiple(double x, double period, double offset, double tol) noexcept {
    return std::abs(std::remainder(x - offset, period)) < tol;
}

[[nodiscard]] inline std::vector<SingularCell> singularity_map(const std::vector<double>& sum_angles,
                                                               const std::vector<double>& varphis,
                                                               const std::vector<double>& v_os,
                                                               const SphereGeometry& geom = {},
                                                               double tolerance = 1e-9) {
    std::vector<SingularCell> out;
    for (double a : sum_angles) {
        for (double phi : varphis) {
            for (double v : v_os) {
                SingularCell cell{a, phi, v, 0.0, {}, false};
                bool det_zero = false;
                if (!chart_valid(v)) {
                    cell.factors.emplace_back("chart");
                    cell.det_closed = std::numeric_limits<double>::infinity();
                } else {
                    cell.det_closed = closed_form_determinant({0, 0, 0, v, 0}, angles_from_sum(a, phi), geom);
                    if (std::abs(std::sin(a)) < tolerance) cell.factors.emplace_back("sin(theta+varphi)");
                    if (std::abs(std::sin(a) + std::cos(a)) < tolerance) cell.factors.emplace_back("sin+cos");
                    if (std::abs(std::cos(phi)) < tolerance) cell.factors.emplace_back("cos(varphi)");
                    if (std::abs(std::sin(v)) < tolerance) cell.factors.emplace_back("sin(v_o)");
                    det_zero = !cell.factors.empty();
                }
                if (near_multiple(a, M_PI, M_PI / 2.0, tolerance)) {
                    cell.factors.emplace_back("listed-half-pi");
                    cell.listed_only = !det_zero && chart_valid(v);
                }
                if (!cell.factors.empty()) out.push_back(std::move(cell));
            }
        }
    }
    return out;
}

}  // namespace darboux_roll
