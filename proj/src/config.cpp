#include "coagbreak/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace coagbreak {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string fmt(Real v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<Real>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ", ";
        out += fmt(vs[i]);
    }
    return out;
}

using Section = std::map<std::string, std::string>;
using Document = std::map<std::string, Section>;

struct Reader {
    const Document& doc;
    std::vector<std::string>& errors;

    bool has(const std::string& sec, const std::string& key) const {
        auto s = doc.find(sec);
        return s != doc.end() && s->second.count(key) > 0;
    }

    std::optional<std::string> raw(const std::string& sec, const std::string& key) {
        auto s = doc.find(sec);
        if (s == doc.end()) return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        return k->second;
    }

    Real number(const std::string& sec, const std::string& key, Real fallback) {
        auto v = raw(sec, key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const Real out = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("trailing characters");
            return out;
        } catch (const std::exception&) {
            errors.push_back("[" + sec + "] " + key + ": not a number: '" + *v + "'");
            return fallback;
        }
    }

    int integer(const std::string& sec, const std::string& key, int fallback) {
        const Real v = number(sec, key, static_cast<Real>(fallback));
        const int i = static_cast<int>(std::llround(v));
        if (static_cast<Real>(i) != v)
            errors.push_back("[" + sec + "] " + key + ": must be an integer");
        return i;
    }

    std::string word(const std::string& sec, const std::string& key,
                     const std::string& fallback) {
        auto v = raw(sec, key);
        return v ? *v : fallback;
    }

    bool flag(const std::string& sec, const std::string& key, bool fallback) {
        auto v = raw(sec, key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        errors.push_back("[" + sec + "] " + key + ": expected a boolean");
        return fallback;
    }

    std::vector<Real> list(const std::string& sec, const std::string& key) {
        auto v = raw(sec, key);
        std::vector<Real> out;
        if (!v) return out;
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                errors.push_back("[" + sec + "] " + key + ": not a number: '" + item + "'");
            }
        }
        return out;
    }

    void report_unknown() {
        static const std::map<std::string, std::set<std::string>> known = {
            {"kernel", {"variant", "k", "omega", "sigma", "k_bound"}},
            {"probability", {"variant", "value", "scale"}},
            {"daughter", {"theta", "elastic"}},
            {"grid", {"n", "cells_per_decade"}},
            {"initial", {"preset", "amplitude", "rate", "shape", "v0", "path"}},
            {"solver",
             {"t_end", "rel_tol", "abs_tol", "dt_init", "dt_min", "dt_max",
              "negativity_clip", "checkpoints", "output_times"}},
            {"diagnostics", {"extra_moments", "tail_lambda", "mass_drift_tol"}},
            {"study",
             {"kind", "n_values", "scenario", "epsilon", "contraction_slack"}},
        };
        for (const auto& [sec, kv] : doc) {
            auto ks = known.find(sec);
            if (ks == known.end()) {
                errors.push_back("unknown section [" + sec + "]");
                continue;
            }
            for (const auto& [key, value] : kv) {
                (void)value;
                if (!ks->second.count(key))
                    errors.push_back("unknown key '" + key + "' in [" + sec + "]");
            }
        }
    }
};

std::optional<Document> tokenize(const std::string& text,
                                 std::vector<std::string>& errors) {
    Document doc;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) +
                                 ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            doc[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        if (section.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": key outside a section");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (doc[section].count(key)) {
            errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" +
                             key + "' in [" + section + "]");
            continue;
        }
        doc[section][key] = value;
    }
    if (!errors.empty()) return std::nullopt;
    return doc;
}

} // namespace

std::function<Real(Real)> InitialSpec::evaluator() const {
    switch (preset) {
    case Preset::Exponential: {
        const Real A = amplitude, beta = rate;
        return [A, beta](Real mu) { return A * std::exp(-beta * mu); };
    }
    case Preset::Gamma: {
        const Real A = amplitude, beta = rate, kshape = shape;
        return [A, beta, kshape](Real mu) {
            return A * std::pow(mu, kshape - 1.0) * std::exp(-beta * mu);
        };
    }
    case Preset::Monodisperse:
        throw std::logic_error("monodisperse preset needs the grid; use build_initial_state");
    case Preset::Table: {
        std::ifstream in(table_path);
        if (!in)
            throw std::runtime_error("cannot open initial-data table: " + table_path);
        std::vector<Real> vols, dens;
        Real v, d;
        while (in >> v >> d) {
            if (!(v > 0.0) || d < 0.0)
                throw std::runtime_error("initial-data table needs positive volumes "
                                         "and nonnegative densities");
            if (!vols.empty() && v <= vols.back())
                throw std::runtime_error("initial-data table volumes must increase");
            vols.push_back(v);
            dens.push_back(d);
        }
        if (vols.size() < 2)
            throw std::runtime_error("initial-data table needs at least two rows");
        return [vols, dens](Real mu) {
            if (mu <= vols.front() || mu >= vols.back()) {
                if (mu == vols.front()) return dens.front();
                return 0.0;
            }
            auto it = std::upper_bound(vols.begin(), vols.end(), mu);
            const std::size_t hi = static_cast<std::size_t>(it - vols.begin());
            const std::size_t lo = hi - 1;
            const Real f = (std::log(mu) - std::log(vols[lo])) /
                           (std::log(vols[hi]) - std::log(vols[lo]));
            return dens[lo] + f * (dens[hi] - dens[lo]);
        };
    }
    }
    throw std::logic_error("unhandled initial preset");
}

State build_initial_state(const InitialSpec& spec, const Grid& grid,
                          Real quad_rel_tol) {
    if (spec.preset == InitialSpec::Preset::Monodisperse) {
        State s;
        s.t = 0.0;
        s.g = Vec::Zero(grid.size());
        const auto cell = grid.locate(spec.v0);
        if (cell) s.g[*cell] = spec.amplitude;
        return s;
    }
    return truncate_initial(spec.evaluator(), grid, quad_rel_tol);
}

KernelModel RunConfig::kernel_model() const {
    switch (kernel_variant) {
    case KernelVariant::Constant:
        return KernelModel::constant(kernel_k, bound);
    case KernelVariant::KineticTheory:
        return KernelModel::kinetic_theory(kernel_k, bound);
    case KernelVariant::SingularBoundFamily:
        return KernelModel::singular_bound_family(kernel_k, bound);
    case KernelVariant::UniquenessClass:
        return KernelModel::uniqueness_class(kernel_k, bound);
    }
    throw std::logic_error("unhandled kernel variant");
}

CoalescenceProbability RunConfig::probability_model() const {
    if (prob_variant == ProbabilityVariant::ConstantE)
        return CoalescenceProbability::constant(prob_value);
    return CoalescenceProbability::volume_dependent(prob_value);
}

std::string RunConfig::canonical_text() const {
    std::ostringstream out;
    out << "[kernel]\n";
    const char* kv = "constant";
    switch (kernel_variant) {
    case KernelVariant::Constant: kv = "constant"; break;
    case KernelVariant::KineticTheory: kv = "kinetic_theory"; break;
    case KernelVariant::SingularBoundFamily: kv = "singular_bound"; break;
    case KernelVariant::UniquenessClass: kv = "uniqueness_class"; break;
    }
    out << "variant = " << kv << "\n";
    out << "k = " << fmt(kernel_k) << "\n";
    out << "omega = " << fmt(bound.omega) << "\n";
    out << "sigma = " << fmt(bound.sigma) << "\n";
    out << "k_bound = " << fmt(bound.k_bound) << "\n";

    out << "\n[probability]\n";
    if (prob_variant == ProbabilityVariant::ConstantE) {
        out << "variant = constant\n";
        out << "value = " << fmt(prob_value) << "\n";
    } else {
        out << "variant = volume_dependent\n";
        out << "scale = " << fmt(prob_value) << "\n";
    }

    out << "\n[daughter]\n";
    if (daughter.elastic)
        out << "elastic = true\n";
    else
        out << "theta = " << fmt(daughter.theta) << "\n";

    out << "\n[grid]\n";
    out << "n = " << fmt(grid_n) << "\n";
    out << "cells_per_decade = " << cells_per_decade << "\n";

    out << "\n[initial]\n";
    const char* pv = "exponential";
    switch (initial.preset) {
    case InitialSpec::Preset::Exponential: pv = "exponential"; break;
    case InitialSpec::Preset::Gamma: pv = "gamma"; break;
    case InitialSpec::Preset::Monodisperse: pv = "monodisperse"; break;
    case InitialSpec::Preset::Table: pv = "table"; break;
    }
    out << "preset = " << pv << "\n";
    out << "amplitude = " << fmt(initial.amplitude) << "\n";
    switch (initial.preset) {
    case InitialSpec::Preset::Exponential:
        out << "rate = " << fmt(initial.rate) << "\n";
        break;
    case InitialSpec::Preset::Gamma:
        out << "rate = " << fmt(initial.rate) << "\n";
        out << "shape = " << fmt(initial.shape) << "\n";
        break;
    case InitialSpec::Preset::Monodisperse:
        out << "v0 = " << fmt(initial.v0) << "\n";
        break;
    case InitialSpec::Preset::Table:
        out << "path = " << initial.table_path << "\n";
        break;
    }

    out << "\n[solver]\n";
    out << "t_end = " << fmt(solver.t_end) << "\n";
    out << "rel_tol = " << fmt(solver.rel_tol) << "\n";
    out << "abs_tol = " << fmt(solver.abs_tol) << "\n";
    out << "dt_init = " << fmt(solver.dt_init) << "\n";
    out << "dt_min = " << fmt(solver.dt_min) << "\n";
    out << "dt_max = " << fmt(solver.dt_max) << "\n";
    if (solver.negativity_clip > 0.0)
        out << "negativity_clip = " << fmt(solver.negativity_clip) << "\n";
    else
        out << "negativity_clip = auto\n";
    if (!solver.output_times.empty())
        out << "output_times = " << fmt_list(solver.output_times) << "\n";
    else
        out << "checkpoints = " << solver.checkpoints << "\n";

    out << "\n[diagnostics]\n";
    if (!extra_moments.empty())
        out << "extra_moments = " << fmt_list(extra_moments) << "\n";
    out << "tail_lambda = " << fmt(tail_lambda) << "\n";
    out << "mass_drift_tol = " << fmt(mass_drift_tol) << "\n";

    if (study.kind != StudySpec::Kind::None) {
        out << "\n[study]\n";
        const char* sv = "truncation";
        switch (study.kind) {
        case StudySpec::Kind::Truncation: sv = "truncation"; break;
        case StudySpec::Kind::Analytic: sv = "analytic"; break;
        case StudySpec::Kind::Uniqueness: sv = "uniqueness"; break;
        case StudySpec::Kind::None: break;
        }
        out << "kind = " << sv << "\n";
        if (!study.n_values.empty())
            out << "n_values = " << fmt_list(study.n_values) << "\n";
        if (!study.scenario.empty())
            out << "scenario = " << study.scenario << "\n";
        out << "epsilon = " << fmt(study.epsilon) << "\n";
        out << "contraction_slack = " << fmt(study.contraction_slack) << "\n";
    }
    return out.str();
}

std::string RunConfig::hash() const {
    const std::string text = canonical_text();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    auto doc = tokenize(text, result.errors);
    if (!doc) return result;

    Reader rd{*doc, result.errors};
    RunConfig cfg;

    const std::string kvar = rd.word("kernel", "variant", "constant");
    if (kvar == "constant") cfg.kernel_variant = KernelVariant::Constant;
    else if (kvar == "kinetic_theory") cfg.kernel_variant = KernelVariant::KineticTheory;
    else if (kvar == "singular_bound") cfg.kernel_variant = KernelVariant::SingularBoundFamily;
    else if (kvar == "uniqueness_class") cfg.kernel_variant = KernelVariant::UniquenessClass;
    else result.errors.push_back("[kernel] variant: unknown '" + kvar + "'");

    cfg.kernel_k = rd.number("kernel", "k", 1.0);
    cfg.bound.omega = rd.number("kernel", "omega", 0.25);
    cfg.bound.sigma = rd.number("kernel", "sigma", 0.25);
    cfg.bound.k_bound = rd.number("kernel", "k_bound", cfg.kernel_k);

    if (!(cfg.kernel_k >= 0.0))
        result.errors.push_back("[kernel] k: k >= 0 required (hypothesis (2.1))");
    if (!(cfg.bound.sigma > 0.0 && cfg.bound.sigma < 0.5))
        result.errors.push_back("[kernel] sigma: sigma in (0, 1/2) required "
                                "(hypothesis (2.1))");
    if (!(cfg.bound.omega >= 0.0 && cfg.bound.omega < 1.0))
        result.errors.push_back("[kernel] omega: omega in [0, 1) required "
                                "(hypothesis (2.1))");
    else if (!(cfg.bound.omega - cfg.bound.sigma >= 0.0 &&
               cfg.bound.omega - cfg.bound.sigma < 1.0))
        result.errors.push_back("[kernel] omega: 0 <= omega - sigma < 1 required "
                                "(hypothesis (2.1))");
    if (!(cfg.bound.k_bound >= 0.0))
        result.errors.push_back("[kernel] k_bound: must be >= 0 (hypothesis (2.1))");

    const std::string pvar = rd.word("probability", "variant", "constant");
    if (pvar == "constant") {
        cfg.prob_variant = ProbabilityVariant::ConstantE;
        cfg.prob_value = rd.number("probability", "value", 1.0);
        if (!(cfg.prob_value >= 0.0 && cfg.prob_value <= 1.0))
            result.errors.push_back("[probability] value: E in [0, 1] required");
    } else if (pvar == "volume_dependent") {
        cfg.prob_variant = ProbabilityVariant::VolumeDependent;
        cfg.prob_value = rd.number("probability", "scale", 1.0);
        if (!(cfg.prob_value > 0.0))
            result.errors.push_back("[probability] scale: must be > 0");
    } else {
        result.errors.push_back("[probability] variant: unknown '" + pvar + "'");
    }

    cfg.daughter.elastic = rd.flag("daughter", "elastic", false);
    cfg.daughter.theta = rd.number("daughter", "theta", 0.0);
    if (!cfg.daughter.elastic) {
        if (!(cfg.daughter.theta > -1.0 && cfg.daughter.theta <= 0.0))
            result.errors.push_back(
                "[daughter] theta: theta in (-1, 0] required (infeasible fragment count)");
        else if (!(-cfg.daughter.theta + cfg.bound.sigma < 1.0))
            result.errors.push_back(
                "[daughter] theta: tau2 + sigma < 1 required with tau2 = -theta "
                "(hypothesis (2.6))");
    } else if (rd.has("daughter", "theta")) {
        result.errors.push_back("[daughter] theta: meaningless with elastic = true");
    }

    cfg.grid_n = rd.number("grid", "n", 100.0);
    cfg.cells_per_decade = rd.integer("grid", "cells_per_decade", 8);
    if (!(cfg.grid_n > 1.0))
        result.errors.push_back("[grid] n: truncation parameter must exceed 1");
    if (cfg.cells_per_decade < 1)
        result.errors.push_back("[grid] cells_per_decade: must be >= 1");

    const std::string prs = rd.word("initial", "preset", "exponential");
    if (prs == "exponential") cfg.initial.preset = InitialSpec::Preset::Exponential;
    else if (prs == "gamma") cfg.initial.preset = InitialSpec::Preset::Gamma;
    else if (prs == "monodisperse") cfg.initial.preset = InitialSpec::Preset::Monodisperse;
    else if (prs == "table") cfg.initial.preset = InitialSpec::Preset::Table;
    else result.errors.push_back("[initial] preset: unknown '" + prs + "'");
    cfg.initial.amplitude = rd.number("initial", "amplitude", 1.0);
    cfg.initial.rate = rd.number("initial", "rate", 1.0);
    cfg.initial.shape = rd.number("initial", "shape", 2.0);
    cfg.initial.v0 = rd.number("initial", "v0", 1.0);
    cfg.initial.table_path = rd.word("initial", "path", "");
    if (!(cfg.initial.amplitude >= 0.0))
        result.errors.push_back("[initial] amplitude: must be >= 0");
    if (!(cfg.initial.rate > 0.0))
        result.errors.push_back("[initial] rate: must be > 0");
    if (!(cfg.initial.shape > 0.0))
        result.errors.push_back("[initial] shape: must be > 0");
    if (!(cfg.initial.v0 > 0.0))
        result.errors.push_back("[initial] v0: must be > 0");
    if (cfg.initial.preset == InitialSpec::Preset::Table && cfg.initial.table_path.empty())
        result.errors.push_back("[initial] path: required for the table preset");

    cfg.solver.t_end = rd.number("solver", "t_end", 1.0);
    cfg.solver.rel_tol = rd.number("solver", "rel_tol", 1e-8);
    cfg.solver.abs_tol = rd.number("solver", "abs_tol", 1e-12);
    cfg.solver.dt_init = rd.number("solver", "dt_init", 1e-3);
    cfg.solver.dt_min = rd.number("solver", "dt_min", 1e-12);
    cfg.solver.dt_max = rd.number("solver", "dt_max", 1.0);
    const std::string clip = rd.word("solver", "negativity_clip", "auto");
    if (clip == "auto") {
        cfg.solver.negativity_clip = -1.0;
    } else {
        try {
            cfg.solver.negativity_clip = std::stod(clip);
            if (!(cfg.solver.negativity_clip >= 0.0))
                result.errors.push_back("[solver] negativity_clip: must be >= 0 or auto");
        } catch (const std::exception&) {
            result.errors.push_back("[solver] negativity_clip: expected a number or auto");
        }
    }
    cfg.solver.checkpoints = rd.integer("solver", "checkpoints", 11);
    cfg.solver.output_times = rd.list("solver", "output_times");
    if (!(cfg.solver.t_end >= 0.0))
        result.errors.push_back("[solver] t_end: must be >= 0");
    if (!(cfg.solver.rel_tol > 0.0 && cfg.solver.abs_tol > 0.0))
        result.errors.push_back("[solver] tolerances must be positive");
    if (!(cfg.solver.dt_min > 0.0 && cfg.solver.dt_min <= cfg.solver.dt_init &&
          cfg.solver.dt_init <= cfg.solver.dt_max))
        result.errors.push_back("[solver] require 0 < dt_min <= dt_init <= dt_max");
    if (cfg.solver.checkpoints < 2)
        result.errors.push_back("[solver] checkpoints: must be >= 2");

    cfg.extra_moments = rd.list("diagnostics", "extra_moments");
    cfg.tail_lambda = rd.number("diagnostics", "tail_lambda", 1.0);
    cfg.mass_drift_tol = rd.number("diagnostics", "mass_drift_tol", 1e-8);
    if (!(cfg.tail_lambda > 0.0))
        result.errors.push_back("[diagnostics] tail_lambda: must be > 0");
    if (!(cfg.mass_drift_tol > 0.0))
        result.errors.push_back("[diagnostics] mass_drift_tol: must be > 0");

    const std::string skind = rd.word("study", "kind", "none");
    if (skind == "none") cfg.study.kind = StudySpec::Kind::None;
    else if (skind == "truncation") cfg.study.kind = StudySpec::Kind::Truncation;
    else if (skind == "analytic") cfg.study.kind = StudySpec::Kind::Analytic;
    else if (skind == "uniqueness") cfg.study.kind = StudySpec::Kind::Uniqueness;
    else result.errors.push_back("[study] kind: unknown '" + skind + "'");
    cfg.study.n_values = rd.list("study", "n_values");
    cfg.study.scenario = rd.word("study", "scenario", "");
    cfg.study.epsilon = rd.number("study", "epsilon", 1e-3);
    cfg.study.contraction_slack = rd.number("study", "contraction_slack", 0.05);
    if (cfg.study.kind == StudySpec::Kind::Truncation) {
        if (cfg.study.n_values.size() < 3)
            result.errors.push_back("[study] n_values: truncation study needs >= 3 values");
        for (std::size_t i = 1; i < cfg.study.n_values.size(); ++i)
            if (!(cfg.study.n_values[i] > cfg.study.n_values[i - 1])) {
                result.errors.push_back("[study] n_values: must be strictly increasing");
                break;
            }
    }
    if (cfg.study.kind == StudySpec::Kind::Analytic && cfg.study.scenario.empty())
        result.errors.push_back("[study] scenario: required for the analytic study");
    if (cfg.study.kind == StudySpec::Kind::Uniqueness && !(cfg.study.epsilon >= 0.0))
        result.errors.push_back("[study] epsilon: must be >= 0");

    rd.report_unknown();

    if (result.errors.empty()) result.config = std::move(cfg);
    return result;
}

ParseResult parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.errors.push_back("cannot open config file: " + path);
        return r;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace coagbreak
