#include "coagbreak/dispatch.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "coagbreak/io.hpp"

namespace coagbreak {

namespace {

namespace fs = std::filesystem;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    Real seconds() const {
        return std::chrono::duration<Real>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

nlohmann::json verdict_json(const std::string& name, Real value, Real threshold,
                            bool pass) {
    return {{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", pass}};
}

int command_run(const RunConfig& cfg, const fs::path& out, int threads) {
    Timer timer;
    const Grid grid = build_grid(cfg.grid_n, cfg.cells_per_decade);
    OperatorWorkspace ws(grid, cfg.kernel_model(), cfg.probability_model(),
                         cfg.daughter.model());
    ws.set_threads(threads);
    const State initial = build_initial_state(cfg.initial, grid);
    const Trajectory traj = run(ws, initial, cfg.solver);

    const Real sigma = cfg.bound.sigma;
    const DaughterModel daughter = cfg.daughter.model();

    BoundCertificate cert;
    const Real g_in_norm = s_norm(initial, grid, sigma);
    const bool eta_ok = !daughter.is_elastic() && daughter.eta_defined(2.0 * sigma);
    if (eta_ok && g_in_norm > 0.0 && cfg.bound.k_bound > 0.0)
        cert = bound_certificate(g_in_norm, cfg.bound.k_bound, cfg.bound.omega,
                                 sigma, daughter.eta(2.0 * sigma), cfg.solver.t_end);
    const BoundCheck bound_check = check_bound(traj, grid, sigma, cert);

    const Real m1_0 = moment(initial, grid, 1.0);
    nlohmann::json checkpoints = nlohmann::json::array();
    Real worst_drift = 0.0;
    for (const State& s : traj.states) {
        const MomentRecord rec = moment_record(s, grid, sigma, cfg.extra_moments);
        nlohmann::json moments = nlohmann::json::array();
        for (const auto& [q, value] : rec.values)
            moments.push_back({{"q", q}, {"value", value}});
        const Real drift =
            m1_0 > 0.0 ? std::abs(rec.values.at(1.0) - m1_0) / m1_0 : 0.0;
        worst_drift = std::max(worst_drift, drift);
        const TailMass tail = tail_mass(s, grid, cfg.tail_lambda, sigma, m1_0);
        checkpoints.push_back({{"t", s.t},
                               {"moments", moments},
                               {"s_norm", s_norm(s, grid, sigma)},
                               {"mass_drift", drift},
                               {"tail_mass", tail.value},
                               {"tail_majorant", tail.majorant}});
    }

    const bool mass_ok = worst_drift <= cfg.mass_drift_tol;
    const bool bound_ok = !cert.available || bound_check.pass;

    nlohmann::json manifest;
    manifest["version"] = kVersion;
    manifest["command"] = "run";
    manifest["threads"] = threads;
    manifest["config_echo"] = cfg.canonical_text();
    manifest["config_hash"] = cfg.hash();
    manifest["grid"] = grid_summary_json(grid);
    manifest["workspace"] = {{"cells", ws.stats().cells},
                             {"pairs_total", ws.stats().pairs_total},
                             {"pairs_coagulation", ws.stats().pairs_coag},
                             {"pairs_breakage", ws.stats().pairs_break},
                             {"tensor_bytes", ws.stats().tensor_bytes},
                             {"assembly_seconds", ws.stats().assembly_seconds}};
    manifest["certificate"] = certificate_json(cert);
    if (cert.available) {
        manifest["certificate"]["pass"] = bound_check.pass;
        manifest["certificate"]["min_margin"] = bound_check.min_margin;
    }
    manifest["steps"] = step_stats_json(traj.steps);
    manifest["checkpoints"] = checkpoints;
    manifest["verdicts"] = nlohmann::json::array(
        {verdict_json("mass_drift <= tol", worst_drift, cfg.mass_drift_tol, mass_ok),
         verdict_json("s_norm <= P(T)", cert.available ? bound_check.min_margin : 0.0,
                      0.0, bound_ok)});
    manifest["wall_seconds"] = timer.seconds();

    write_text_file((out / "trajectory.csv").string(), trajectory_csv(traj, grid));
    write_text_file((out / "manifest.json").string(), manifest.dump(2) + "\n");

    return (mass_ok && bound_ok) ? kExitPass : kExitVerdictFail;
}

int command_check_assumptions(const RunConfig& cfg, const fs::path& out) {
    const AssumptionReport report = check_assumptions(
        cfg.kernel_model(), cfg.probability_model(), cfg.daughter.model());

    // 2.7 binds only when a uniqueness experiment is requested; it is
    // reported regardless.
    const bool need_27 = cfg.study.kind == StudySpec::Kind::Uniqueness;
    bool ok = true;
    for (const HypothesisRecord& h : report.hypotheses) {
        if (h.id == "2.7" && !need_27) continue;
        if (h.status == "fail") ok = false;
    }

    nlohmann::json doc = assumption_report_json(report);
    doc["config_hash"] = cfg.hash();
    doc["binding"] = need_27 ? "2.1 2.2 2.3 2.6 2.7" : "2.1 2.2 2.3 2.6";
    doc["verdict_pass"] = ok;
    write_text_file((out / "assumptions.json").string(), doc.dump(2) + "\n");
    return ok ? kExitPass : kExitVerdictFail;
}

int command_study(const RunConfig& cfg, const fs::path& out, int threads) {
    StudyReport report;
    switch (cfg.study.kind) {
    case StudySpec::Kind::Truncation:
        report = truncation_sweep(cfg, cfg.study.n_values, threads);
        break;
    case StudySpec::Kind::Analytic:
        report = analytic_compare(cfg, cfg.study.scenario, threads);
        break;
    case StudySpec::Kind::Uniqueness:
        report = uniqueness_experiment(cfg, cfg.study.epsilon, threads);
        break;
    case StudySpec::Kind::None:
        std::cerr << "config has no [study] section\n";
        return kExitError;
    }
    write_text_file((out / "study.json").string(),
                    study_report_json(report).dump(2) + "\n");
    write_text_file((out / "study_curve.tsv").string(), study_curve_tsv(report));
    return report.all_pass() ? kExitPass : kExitVerdictFail;
}

int command_compare_analytic(const RunConfig& cfg, const fs::path& out, int threads) {
    if (cfg.study.scenario.empty()) {
        std::cerr << "compare-analytic needs [study] scenario\n";
        return kExitError;
    }
    const StudyReport report = analytic_compare(cfg, cfg.study.scenario, threads);
    write_text_file((out / "study.json").string(),
                    study_report_json(report).dump(2) + "\n");
    write_text_file((out / "study_curve.tsv").string(), study_curve_tsv(report));
    return report.all_pass() ? kExitPass : kExitVerdictFail;
}

} // namespace

int dispatch(const std::string& command, const std::string& config_path,
             const std::string& out_dir, int threads) {
    try {
        const ParseResult parsed = parse_config_file(config_path);
        if (!parsed.ok()) {
            for (const std::string& e : parsed.errors) std::cerr << e << "\n";
            return kExitError;
        }
        const RunConfig& cfg = *parsed.config;

        fs::path out(out_dir);
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec && !fs::is_directory(out)) {
            std::cerr << "cannot create output directory: " << out_dir << "\n";
            return kExitError;
        }

        if (command == "run") return command_run(cfg, out, threads);
        if (command == "check-assumptions") return command_check_assumptions(cfg, out);
        if (command == "study") return command_study(cfg, out, threads);
        if (command == "compare-analytic")
            return command_compare_analytic(cfg, out, threads);
        std::cerr << "unknown command: " << command << "\n";
        return kExitError;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << " (t=" << e.time
                  << ", dt=" << e.step_size << ")\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}

} // namespace coagbreak
