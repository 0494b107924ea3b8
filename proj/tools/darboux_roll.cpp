// Command-line front end: scenario runner and acceptance self-test.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "darboux_roll/acceptance.hpp"
#include "darboux_roll/io.hpp"

namespace fs = std::filesystem;
using namespace darboux_roll;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kRefused = 1, kInvalid = 2, kAborted = 3 };

struct RunOutcome {
    int code = kOk;
    std::string message;
};

bool write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

bool write_csv(const fs::path& p, const Trajectory& t) {
    std::ofstream out(p, std::ios::binary);
    io::write_trajectory_csv(out, t);
    return static_cast<bool>(out);
}

RunOutcome run_one(const fs::path& scenario_path, const fs::path& out_dir, bool force) {
    std::ifstream in(scenario_path);
    if (!in) return {kRefused, scenario_path.string() + ": cannot read file"};

    io::ScenarioFile file;
    try {
        file = io::parse_scenario(in);
    } catch (const io::ScenarioError& e) {
        return {kInvalid, scenario_path.string() + ": " + e.what()};
    }

    std::error_code ec;
    if (fs::exists(out_dir) && !fs::is_empty(out_dir, ec) && !force) {
        return {kRefused, out_dir.string() + ": output directory exists and is not empty (use --force)"};
    }
    fs::create_directories(out_dir, ec);
    if (ec) return {kRefused, out_dir.string() + ": " + ec.message()};

    json report;
    report["scenario_file"] = scenario_path.filename().string();
    std::vector<std::pair<std::string, Trajectory>> csvs;
    std::optional<Trajectory> primary;
    bool aborted = false;

    try {
        const bool pair = file.equivalence || (file.has_model && file.scenario->model == ModelKind::EquivalencePair);
        if (file.has_model && !pair) primary = integrate(*file.scenario);
        if (file.scenario) {
            report["scenario_hash"] = scenario_hash(*file.scenario);
            report["model"] = std::string(to_string(file.scenario->model));
            report["radius"] = file.scenario->geom.radius;
        }
        if (pair) {
            const EquivalenceResult eq = equivalence_run(*file.scenario);
            report["equivalence"] = {{"max_gap", eq.max_gap},
                                     {"darboux", io::trajectory_summary(eq.traj_darboux)},
                                     {"montana_mapped", io::trajectory_summary(eq.traj_montana_mapped)}};
            aborted = aborted || !eq.traj_darboux.completed() || !eq.traj_montana_mapped.completed();
            primary = eq.traj_darboux;
            csvs.emplace_back("trajectory_montana_mapped.csv", eq.traj_montana_mapped);
        }
        if (file.fig4) {
            const ContactState start = file.scenario ? file.scenario->initial : ContactState{};
            const SphereGeometry geom = file.scenario ? file.scenario->geom : SphereGeometry{};
            const Fig4Result r =
                fig4_study(geom, file.fig4->g_f, file.fig4->triples, start, file.fig4->span, file.fig4->step);
            json runs = json::array();
            for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
                const auto& v = file.fig4->triples[i];
                json s = io::trajectory_summary(r.trajectories[i]);
                s["inputs"] = {v.alpha_s, v.beta_s, v.gamma_s};
                s["csv"] = "trajectory_fig4_" + std::to_string(i) + ".csv";
                runs.push_back(s);
                csvs.emplace_back(s["csv"].get<std::string>(), r.trajectories[i]);
                aborted = aborted || !r.trajectories[i].completed();
            }
            report["fig4"] = {{"goal_heading", file.fig4->g_f},
                              {"max_heading_error", r.max_heading_error},
                              {"min_pairwise_sphere_gap", r.min_pairwise_sphere_gap},
                              {"runs", runs}};
            if (!primary && !r.trajectories.empty()) primary = r.trajectories.front();
        }
        if (file.fig5) {
            const SphereGeometry geom = file.scenario ? file.scenario->geom : SphereGeometry{};
            const Fig5Result r = fig5_study(geom, file.fig5->span, file.fig5->step);
            auto period = [](const PeriodEstimate& p) {
                return json{{"period", p.period}, {"spread", p.spread}, {"crossings", p.crossings.size()}};
            };
            report["fig5"] = {{"expected_heading", r.expected_heading},
                              {"max_heading_error", r.max_heading_error},
                              {"psi", period(r.psi)},
                              {"v_o", period(r.v_o)},
                              {"u_o_rate", period(r.u_o_rate)},
                              {"trajectory", io::trajectory_summary(r.trajectory)}};
            aborted = aborted || !r.trajectory.completed();
            if (!primary) {
                primary = r.trajectory;
            } else {
                csvs.emplace_back("trajectory_fig5.csv", r.trajectory);
            }
        }
        if (file.ctrb_scan) {
            const SphereGeometry geom = file.scenario ? file.scenario->geom : SphereGeometry{};
            report["ctrb_scan"] = io::ctrb_scan_json(*file.ctrb_scan, geom);
        }
        if (file.wpps_threshold) {
            json rows = json::array();
            for (const auto& e : file.scenario->inputs.entries) {
                const WppsReport w = wpps_report(e.inputs, *file.scenario->goal, file.scenario->geom,
                                                 *file.wpps_threshold);
                rows.push_back({{"s_start", e.s_start},
                                {"rho", w.rho},
                                {"rho_squared", w.rho_squared},
                                {"threshold", w.threshold},
                                {"passes", w.passes}});
            }
            report["wpps"] = rows;
        }
    } catch (const KinematicsError& e) {
        return {kInvalid, scenario_path.string() + ": " + e.what()};
    }

    if (primary) {
        report["trajectory"] = io::trajectory_summary(*primary);
        aborted = aborted || !primary->completed();
    }
    bool ok = primary ? write_csv(out_dir / "trajectory.csv", *primary)
                      : write_text(out_dir / "trajectory.csv", std::string(io::kCsvHeader) + "\n");
    std::vector<std::string> plotted;
    if (primary) plotted.emplace_back("trajectory.csv");
    for (const auto& [name, traj] : csvs) {
        ok = ok && write_csv(out_dir / name, traj);
        plotted.push_back(name);
    }
    report["aborted"] = aborted;
    ok = ok && write_text(out_dir / "report.json", report.dump(2) + "\n");
    if (!plotted.empty()) ok = ok && write_text(out_dir / "plot.gp", io::plot_script(plotted, scenario_path.stem().string()));
    if (!ok) return {kRefused, out_dir.string() + ": failed to write outputs"};
    if (aborted) return {kAborted, scenario_path.string() + ": integration stopped at a singularity; partial results written"};
    return {kOk, scenario_path.string() + ": wrote " + out_dir.string()};
}

int cmd_run(const std::vector<std::string>& paths, const std::string& out, bool force, unsigned jobs) {
    std::vector<RunOutcome> outcomes(paths.size());
    std::vector<fs::path> dirs;
    for (const auto& p : paths) {
        const fs::path stem = fs::path(p).stem();
        if (out.empty()) {
            dirs.push_back(fs::path("results") / stem);
        } else {
            dirs.push_back(paths.size() == 1 ? fs::path(out) : fs::path(out) / stem);
        }
    }
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        for (std::size_t j = i + 1; j < dirs.size(); ++j) {
            if (dirs[i] == dirs[j]) {
                std::cerr << "error: scenarios " << paths[i] << " and " << paths[j]
                          << " would write to the same directory\n";
                return kRefused;
            }
        }
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < paths.size(); i = next++) outcomes[i] = run_one(paths[i], dirs[i], force);
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(paths.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // Validation errors outrank refusals, which outrank singularity aborts.
    auto severity = [](int c) { return c == kInvalid ? 3 : c == kRefused ? 2 : c == kAborted ? 1 : 0; };
    int code = kOk;
    for (const auto& o : outcomes) {
        (o.code == kOk ? std::cout : std::cerr) << o.message << "\n";
        if (severity(o.code) > severity(code)) code = o.code;
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sphere-on-plane spin-rolling kinematics: scenario runner and self-test"};
    app.require_subcommand(1);

    std::vector<std::string> paths;
    std::string out;
    bool force = false;
    unsigned jobs = 1;
    auto* run = app.add_subcommand("run", "Integrate scenario files and write CSV, report.json and plot.gp");
    run->add_option("scenario", paths, "Scenario JSON files")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory (per-scenario subdirectories when several files are given)");
    run->add_flag("--force", force, "Overwrite a non-empty output directory");
    run->add_option("--jobs", jobs, "Number of scenarios processed in parallel")->check(CLI::PositiveNumber);

    acceptance::SuiteOptions opt;
    auto* selftest = app.add_subcommand("selftest", "Run the acceptance criteria and print a pass/fail table");
    selftest->add_option("--filter", opt.filter, "Only criteria whose module or name contains this text");
    selftest->add_flag("--mutate-mapping", opt.mutate_mapping, "")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kInvalid;
    }

    if (*run) return cmd_run(paths, out, force, jobs);

    opt.seed = acceptance::seed_from_env();
    const auto results = acceptance::run_suite(opt);
    acceptance::print_table(stdout, results);
    const bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    std::printf("%zu criteria, %s\n", results.size(), all ? "all passed" : "FAILURES");
    return all && !results.empty() ? 0 : 1;
}
