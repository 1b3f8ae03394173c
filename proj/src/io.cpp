#include "coagbreak/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coagbreak {

std::string format_real(Real v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string trajectory_csv(const Trajectory& traj, const Grid& grid) {
    std::ostringstream out;
    out << "t,x,g\n";
    for (const State& s : traj.states)
        for (Index i = 0; i < grid.size(); ++i)
            out << format_real(s.t) << ',' << format_real(grid.pivot(i)) << ','
                << format_real(s.g[i]) << '\n';
    return out.str();
}

nlohmann::json assumption_report_json(const AssumptionReport& report) {
    nlohmann::json arr = nlohmann::json::array();
    for (const HypothesisRecord& h : report.hypotheses) {
        nlohmann::json item;
        item["id"] = h.id;
        item["status"] = h.status;
        item["description"] = h.description;
        item["worst_ratio"] = h.worst_ratio;
        item["worst_point"] = h.worst_point;
        item["samples"] = h.samples;
        arr.push_back(std::move(item));
    }
    return nlohmann::json{{"hypotheses", arr}, {"all_pass", report.all_pass()}};
}

nlohmann::json step_stats_json(const StepStats& stats) {
    return {{"accepted", stats.accepted},
            {"rejected", stats.rejected},
            {"rhs_evaluations", stats.rhs_evaluations},
            {"dt_smallest", stats.dt_smallest},
            {"dt_largest", stats.dt_largest}};
}

nlohmann::json grid_summary_json(const Grid& grid) {
    nlohmann::json edges = nlohmann::json::array();
    for (Index i = 0; i < grid.edges().size(); ++i) edges.push_back(grid.edges()[i]);
    return {{"n", grid.truncation()},
            {"cells", grid.size()},
            {"cells_per_decade", grid.cells_per_decade()},
            {"edges", edges}};
}

nlohmann::json certificate_json(const BoundCertificate& cert) {
    nlohmann::json j;
    j["available"] = cert.available;
    if (cert.available) {
        j["a"] = cert.a;
        j["b"] = cert.b;
        j["p1"] = cert.p1;
        j["p"] = cert.p;
        j["g_in_norm"] = cert.g_in_norm;
        j["horizon"] = cert.horizon;
    }
    return j;
}

nlohmann::json study_report_json(const StudyReport& report) {
    nlohmann::json j;
    j["kind"] = report.kind;
    j["config_hash"] = report.config_hash;
    j["asserted"] = report.asserted;
    if (!report.notes.empty()) j["notes"] = report.notes;
    j["runs"] = nlohmann::json::array();
    for (const RunSummary& r : report.runs) {
        nlohmann::json run;
        run["label"] = r.label;
        run["sweep_value"] = r.sweep_value;
        run["metrics"] = r.metrics;
        run["steps"] = step_stats_json(r.steps);
        j["runs"].push_back(std::move(run));
    }
    j["derived"] = report.derived;
    j["verdicts"] = nlohmann::json::array();
    for (const Verdict& v : report.verdicts)
        j["verdicts"].push_back({{"name", v.name},
                                 {"value", v.value},
                                 {"threshold", v.threshold},
                                 {"relation", v.relation},
                                 {"pass", v.pass}});
    j["all_pass"] = report.all_pass();
    return j;
}

std::string study_curve_tsv(const StudyReport& report) {
    std::ostringstream out;
    out << "t\t" << (report.curve_name.empty() ? "metric" : report.curve_name) << "\n";
    for (const auto& [t, v] : report.curve)
        out << format_real(t) << '\t' << format_real(v) << '\n';
    return out.str();
}

} // namespace coagbreak
