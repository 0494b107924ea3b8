#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "controllability.hpp"
#include "darboux.hpp"
#include "sim.hpp"

namespace darboux_roll::io {

using nlohmann::json;

inline constexpr const char* kCsvHeader =
    "s,t,u_s,v_s,u_o,v_o,psi,theta,varphi,delta,alpha_s,beta_s,gamma_s,heading";

/// Schema violations, one message per offending key.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<std::string> problems)
        : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

    [[nodiscard]] const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& p) {
        std::string out = "invalid scenario:";
        for (const auto& s : p) out += "\n  " + s;
        return out;
    }
    std::vector<std::string> problems_;
};

struct CtrbScan {
    std::vector<double> sum_angles;
    std::vector<double> varphis;
    std::vector<double> v_os;
    double psi = 0.0;
};

struct Fig4Request {
    std::vector<VirtualSurfaceInputs> triples;
    double g_f = 0.0;
    double span = 5.0;
    double step = 1e-3;
};

struct Fig5Request {
    double span = 20.0;
    double step = 1e-3;
};

struct ScenarioFile {
    /// Present when the file has a model, or when an analysis needs the scenario parameters.
    std::optional<Scenario> scenario;
    /// True when the file names a model to integrate.
    bool has_model = false;
    bool equivalence = false;
    std::optional<Fig4Request> fig4;
    std::optional<Fig5Request> fig5;
    std::optional<CtrbScan> ctrb_scan;
    std::optional<double> wpps_threshold;
};

namespace detail {

class Reader {
public:
    std::vector<std::string> problems;

    void allow_only(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
        if (!obj.is_object()) {
            problems.push_back(where + ": expected an object");
            return;
        }
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, _] : obj.items()) {
            if (!allowed.count(k)) problems.push_back(prefix(where) + k + ": unknown key");
        }
    }

    double number(const json& obj, const std::string& where, const char* key, double fallback) {
        if (!obj.is_object() || !obj.contains(key)) return fallback;
        const json& v = obj.at(key);
        if (!v.is_number()) {
            problems.push_back(prefix(where) + key + ": expected a number");
            return fallback;
        }
        return v.get<double>();
    }

    bool boolean(const json& obj, const std::string& where, const char* key, bool fallback) {
        if (!obj.is_object() || !obj.contains(key)) return fallback;
        const json& v = obj.at(key);
        if (!v.is_boolean()) {
            problems.push_back(prefix(where) + key + ": expected true or false");
            return fallback;
        }
        return v.get<bool>();
    }

    std::vector<double> numbers(const json& obj, const std::string& where, const char* key) {
        std::vector<double> out;
        if (!obj.contains(key)) {
            problems.push_back(prefix(where) + key + ": required");
            return out;
        }
        const json& v = obj.at(key);
        if (!v.is_array()) {
            problems.push_back(prefix(where) + key + ": expected an array of numbers");
            return out;
        }
        for (const auto& e : v) {
            if (!e.is_number()) {
                problems.push_back(prefix(where) + key + ": expected an array of numbers");
                return {};
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    VirtualSurfaceInputs inputs(const json& obj, const std::string& where, bool allow_s) {
        if (allow_s) {
            allow_only(obj, where, {"s", "alpha_s", "beta_s", "gamma_s"});
        } else {
            allow_only(obj, where, {"alpha_s", "beta_s", "gamma_s"});
        }
        return {number(obj, where, "alpha_s", 0.0), number(obj, where, "beta_s", 0.0),
                number(obj, where, "gamma_s", 0.0)};
    }

    static std::string prefix(const std::string& where) { return where.empty() ? "" : where + "."; }
};

}  // namespace detail

/// Parses and validates a scenario document. Throws ScenarioError listing every problem found.
[[nodiscard]] inline ScenarioFile parse_scenario(const json& doc) {
    detail::Reader rd;
    ScenarioFile out;
    rd.allow_only(doc, "", {"model", "radius", "initial_state", "inputs", "input_table", "goal_heading",
                            "goal_point", "fixed_angles", "drift_only", "omega", "rolling_rate", "span",
                            "step", "analyses"});
    if (!rd.problems.empty() && !doc.is_object()) throw ScenarioError(rd.problems);

    Scenario sc;
    sc.geom.radius = rd.number(doc, "", "radius", 1.0);
    if (!(sc.geom.radius > 0.0)) rd.problems.emplace_back("radius: must be positive");

    if (doc.contains("initial_state")) {
        const json& st = doc.at("initial_state");
        rd.allow_only(st, "initial_state", {"u_s", "v_s", "u_o", "v_o", "psi"});
        sc.initial = {rd.number(st, "initial_state", "u_s", 0.0), rd.number(st, "initial_state", "v_s", 0.0),
                      rd.number(st, "initial_state", "u_o", 0.0), rd.number(st, "initial_state", "v_o", 0.0),
                      rd.number(st, "initial_state", "psi", 0.0)};
    }

    if (doc.contains("inputs") && doc.contains("input_table")) {
        rd.problems.emplace_back("inputs: give either inputs or input_table, not both");
    }
    if (doc.contains("inputs")) {
        sc.inputs = InputSchedule::constant(rd.inputs(doc.at("inputs"), "inputs", false));
    } else if (doc.contains("input_table")) {
        const json& tab = doc.at("input_table");
        if (!tab.is_array() || tab.empty()) {
            rd.problems.emplace_back("input_table: expected a non-empty array");
        } else {
            sc.inputs.entries.clear();
            for (std::size_t i = 0; i < tab.size(); ++i) {
                const std::string where = "input_table[" + std::to_string(i) + "]";
                const double s0 = rd.number(tab[i], where, "s", 0.0);
                sc.inputs.entries.push_back({s0, rd.inputs(tab[i], where, true)});
            }
        }
    }

    if (doc.contains("goal_heading") && doc.contains("goal_point")) {
        rd.problems.emplace_back("goal_heading: give either goal_heading or goal_point, not both");
    }
    if (doc.contains("goal_heading")) {
        sc.goal = GoalDirection{rd.number(doc, "", "goal_heading", 0.0)};
    } else if (doc.contains("goal_point")) {
        const json& gp = doc.at("goal_point");
        rd.allow_only(gp, "goal_point", {"u_s", "v_s"});
        const double gu = rd.number(gp, "goal_point", "u_s", 0.0);
        const double gv = rd.number(gp, "goal_point", "v_s", 0.0);
        sc.goal = GoalDirection{std::atan2(gv - sc.initial.v_s, gu - sc.initial.u_s)};
    }

    if (doc.contains("fixed_angles")) {
        const json& fa = doc.at("fixed_angles");
        rd.allow_only(fa, "fixed_angles", {"theta", "varphi"});
        sc.fixed_angles = FrameAngles{rd.number(fa, "fixed_angles", "theta", 0.0),
                                      rd.number(fa, "fixed_angles", "varphi", 0.0)};
    }
    sc.drift_only = rd.boolean(doc, "", "drift_only", false);

    if (doc.contains("omega")) {
        const json& w = doc.at("omega");
        rd.allow_only(w, "omega", {"wx", "wy", "wz"});
        sc.omega = BodyAngularVelocity{rd.number(w, "omega", "wx", 0.0), rd.number(w, "omega", "wy", 0.0),
                                       rd.number(w, "omega", "wz", 0.0)};
    }

    sc.span = rd.number(doc, "", "span", 1.0);
    sc.step = rd.number(doc, "", "step", 1e-3);
    if (!(sc.span >= 0.0)) rd.problems.emplace_back("span: must be non-negative");
    if (!(sc.step > 0.0)) rd.problems.emplace_back("step: must be positive");

    if (doc.contains("rolling_rate")) {
        const json& rr = doc.at("rolling_rate");
        rd.allow_only(rr, "rolling_rate", {"kind", "value", "peak", "span"});
        const std::string kind = rr.is_object() && rr.contains("kind") && rr.at("kind").is_string()
                                     ? rr.at("kind").get<std::string>()
                                     : "";
        if (kind == "constant") {
            sc.rate = RollingRateProfile::constant(rd.number(rr, "rolling_rate", "value", 1.0));
            if (!(sc.rate.value >= 0.0)) rd.problems.emplace_back("rolling_rate.value: must be >= 0");
        } else if (kind == "rest-to-rest") {
            sc.rate = RollingRateProfile::rest_to_rest(rd.number(rr, "rolling_rate", "peak", 1.0),
                                                       rd.number(rr, "rolling_rate", "span", sc.span));
        } else {
            rd.problems.emplace_back("rolling_rate.kind: expected \"constant\" or \"rest-to-rest\"");
        }
    }

    if (doc.contains("analyses")) {
        const json& an = doc.at("analyses");
        rd.allow_only(an, "analyses", {"equivalence", "fig4", "fig5", "ctrb_scan", "wpps"});
        out.equivalence = rd.boolean(an, "analyses", "equivalence", false);
        if (an.contains("fig4")) {
            const json& f4 = an.at("fig4");
            rd.allow_only(f4, "analyses.fig4", {"triples", "goal_heading", "span", "step"});
            Fig4Request req;
            req.g_f = rd.number(f4, "analyses.fig4", "goal_heading", sc.goal ? sc.goal->g_f : 0.0);
            req.span = rd.number(f4, "analyses.fig4", "span", 5.0);
            req.step = rd.number(f4, "analyses.fig4", "step", 1e-3);
            if (!f4.contains("triples") || !f4.at("triples").is_array()) {
                rd.problems.emplace_back("analyses.fig4.triples: expected an array of [alpha_s, beta_s, gamma_s]");
            } else {
                for (const auto& t : f4.at("triples")) {
                    if (!t.is_array() || t.size() != 3 || !t[0].is_number() || !t[1].is_number() ||
                        !t[2].is_number()) {
                        rd.problems.emplace_back("analyses.fig4.triples: each entry must be three numbers");
                        break;
                    }
                    req.triples.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
                }
                for (const auto& t : req.triples) {
                    if (t.beta_s == 0.0) {
                        rd.problems.emplace_back(
                            "analyses.fig4.triples: beta_s must be nonzero; without the torsion input the "
                            "bracket rank drops to 4 and the model is not controllable");
                        break;
                    }
                }
            }
            out.fig4 = req;
        }
        if (an.contains("fig5")) {
            const json& f5 = an.at("fig5");
            if (f5.is_boolean()) {
                if (f5.get<bool>()) out.fig5 = Fig5Request{};
            } else {
                rd.allow_only(f5, "analyses.fig5", {"span", "step"});
                out.fig5 = Fig5Request{rd.number(f5, "analyses.fig5", "span", 20.0),
                                       rd.number(f5, "analyses.fig5", "step", 1e-3)};
            }
        }
        if (an.contains("ctrb_scan")) {
            const json& cs = an.at("ctrb_scan");
            rd.allow_only(cs, "analyses.ctrb_scan", {"sum_angles", "varphi", "v_o", "psi"});
            CtrbScan scan;
            scan.sum_angles = rd.numbers(cs, "analyses.ctrb_scan", "sum_angles");
            scan.varphis = rd.numbers(cs, "analyses.ctrb_scan", "varphi");
            scan.v_os = rd.numbers(cs, "analyses.ctrb_scan", "v_o");
            scan.psi = rd.number(cs, "analyses.ctrb_scan", "psi", 0.0);
            out.ctrb_scan = scan;
        }
        if (an.contains("wpps")) {
            const json& wp = an.at("wpps");
            if (wp.is_boolean()) {
                if (wp.get<bool>()) out.wpps_threshold = 100.0;
            } else {
                rd.allow_only(wp, "analyses.wpps", {"threshold"});
                out.wpps_threshold = rd.number(wp, "analyses.wpps", "threshold", 100.0);
            }
        }
    }

    if (doc.contains("model")) {
        const json& m = doc.at("model");
        const auto kind = m.is_string() ? parse_model_kind(m.get<std::string>()) : std::nullopt;
        if (!kind) {
            rd.problems.emplace_back(
                "model: expected darboux-s-domain, darboux-t-domain, montana-t-domain or equivalence-pair");
        } else {
            sc.model = *kind;
        }
    }

    if (rd.problems.empty() && doc.contains("model")) {
        try {
            validate(sc);
        } catch (const KinematicsError& e) {
            rd.problems.emplace_back(std::string("scenario: ") + e.what());
        }
    }
    if (rd.problems.empty() && out.wpps_threshold) {
        if (!sc.goal) {
            rd.problems.emplace_back("analyses.wpps: needs goal_heading or goal_point");
        } else {
            for (const auto& e : sc.inputs.entries) {
                try {
                    (void)goal_cotangent(e.inputs, *sc.goal, sc.geom);
                } catch (const KinematicsError& err) {
                    rd.problems.emplace_back(std::string("analyses.wpps: ") + err.what());
                    break;
                }
            }
        }
    }
    if (!rd.problems.empty()) throw ScenarioError(rd.problems);
    if (doc.contains("model")) {
        out.scenario = sc;
        out.has_model = true;
    }
    if (!out.scenario && (out.equivalence || out.wpps_threshold)) {
        // Analyses that act on the scenario itself still need its parameters.
        out.scenario = sc;
        if (out.equivalence) {
            try {
                validate(sc);
            } catch (const KinematicsError& e) {
                throw ScenarioError({std::string("analyses.equivalence: ") + e.what()});
            }
        }
    }
    return out;
}

[[nodiscard]] inline ScenarioFile parse_scenario(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError({std::string("document: ") + e.what()});
    }
    return parse_scenario(doc);
}

// ---------------------------------------------------------------------------
// CSV

[[nodiscard]] inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << kCsvHeader << '\n';
    for (const auto& p : traj.samples) {
        const double vals[] = {p.s,
                               p.t,
                               p.state.u_s,
                               p.state.v_s,
                               p.state.u_o,
                               p.state.v_o,
                               p.state.psi,
                               p.angles.theta,
                               p.angles.varphi,
                               p.delta,
                               p.inputs.alpha_s,
                               p.inputs.beta_s,
                               p.inputs.gamma_s,
                               p.heading};
        for (std::size_t i = 0; i < std::size(vals); ++i) {
            if (i) out << ',';
            out << format_double(vals[i]);
        }
        out << '\n';
    }
}

/// Reads samples back from write_trajectory_csv output.
[[nodiscard]] inline std::vector<Sample> read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::runtime_error("trajectory CSV: missing or unexpected header");
    }
    std::vector<Sample> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            v.push_back(std::strtod(cell.c_str(), &end));
            if (end == cell.c_str()) throw std::runtime_error("trajectory CSV: bad number '" + cell + "'");
        }
        if (v.size() != 14) throw std::runtime_error("trajectory CSV: expected 14 columns");
        Sample p;
        p.s = v[0];
        p.t = v[1];
        p.state = {v[2], v[3], v[4], v[5], v[6]};
        p.angles = {v[7], v[8]};
        p.delta = v[9];
        p.inputs = {v[10], v[11], v[12]};
        p.heading = v[13];
        out.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Report fragments

[[nodiscard]] inline json to_json(const ContactState& x) {
    return {{"u_s", x.u_s}, {"v_s", x.v_s}, {"u_o", x.u_o}, {"v_o", x.v_o}, {"psi", x.psi}};
}

[[nodiscard]] inline json abort_json(const Trajectory& t) {
    if (!t.abort) return nullptr;
    return {{"kind", std::string(to_string(t.abort->kind))}, {"message", t.abort->message}, {"at", t.abort->at}};
}

[[nodiscard]] inline json trajectory_summary(const Trajectory& t) {
    json j = {{"model", t.model},
              {"scenario_hash", t.scenario_hash},
              {"step", t.step},
              {"samples", t.samples.size()},
              {"completed", t.completed()},
              {"abort", abort_json(t)}};
    if (!t.samples.empty()) {
        j["final_state"] = to_json(t.samples.back().state);
        j["final_s"] = t.samples.back().s;
        j["final_t"] = t.samples.back().t;
    }
    return j;
}

[[nodiscard]] inline json ctrb_scan_json(const CtrbScan& scan, const SphereGeometry& geom) {
    json points = json::array();
    const auto cells = singularity_map(scan.sum_angles, scan.varphis, scan.v_os, geom);
    auto factors_for = [&](double a, double phi, double v) {
        json f = json::array();
        for (const auto& c : cells) {
            if (c.sum_angle == a && c.varphi == phi && c.v_o == v) {
                for (const auto& name : c.factors) f.push_back(name);
            }
        }
        return f;
    };
    for (double a : scan.sum_angles) {
        for (double phi : scan.varphis) {
            for (double v : scan.v_os) {
                const ContactState x{0.0, 0.0, 0.0, v, scan.psi};
                json p = {{"state", to_json(x)},
                          {"sum_angle", a},
                          {"varphi", phi},
                          {"singular_factors", factors_for(a, phi, v)}};
                if (!chart_valid(v)) {
                    p["error"] = "ChartSingularity";
                    p["rank"] = nullptr;
                    p["det_numeric"] = nullptr;
                    p["det_closed"] = nullptr;
                } else {
                    const BracketReport r = controllability_matrix(x, angles_from_sum(a, phi), geom);
                    p["rank"] = r.rank;
                    p["det_numeric"] = r.det_numeric;
                    p["det_closed"] = r.det_closed;
                    p["singular_ratio"] = r.singular_ratio;
                }
                points.push_back(std::move(p));
            }
        }
    }
    return points;
}

/// gnuplot script that plots the CSVs written next to it.
[[nodiscard]] inline std::string plot_script(const std::vector<std::string>& csv_files, const std::string& title) {
    std::ostringstream gp;
    gp << "# " << title << "\n";
    gp << "set datafile separator ','\n";
    gp << "set key autotitle columnhead\n";
    gp << "set multiplot layout 2,1\n";
    gp << "set title 'plane contact path'\nset xlabel 'u_s'\nset ylabel 'v_s'\n";
    gp << "plot ";
    for (std::size_t i = 0; i < csv_files.size(); ++i) {
        if (i) gp << ", ";
        gp << "'" << csv_files[i] << "' using 3:4 with lines title '" << csv_files[i] << "'";
    }
    gp << "\nset title 'sphere coordinates'\nset xlabel 's'\nset ylabel 'rad'\n";
    gp << "plot ";
    for (std::size_t i = 0; i < csv_files.size(); ++i) {
        if (i) gp << ", ";
        gp << "'" << csv_files[i] << "' using 1:5 with lines title 'u_o', "
           << "'" << csv_files[i] << "' using 1:6 with lines title 'v_o', "
           << "'" << csv_files[i] << "' using 1:7 with lines title 'psi'";
    }
    gp << "\nunset multiplot\n";
    return gp.str();
}

}  // namespace darboux_roll::io
