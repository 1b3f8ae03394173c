// Run configuration: flat-section key/value documents, validation, and the
// canonical echo used for manifests and reproducibility hashes.
#ifndef COAGBREAK_CONFIG_HPP
#define COAGBREAK_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "coagbreak/integrator.hpp"
#include "coagbreak/kernels.hpp"
#include "coagbreak/types.hpp"

namespace coagbreak {

struct InitialSpec {
    enum class Preset { Exponential, Gamma, Monodisperse, Table };
    Preset preset = Preset::Exponential;
    Real amplitude = 1.0;
    Real rate = 1.0;        // exponential / gamma decay
    Real shape = 2.0;       // gamma shape
    Real v0 = 1.0;          // monodisperse cell volume
    std::string table_path; // two-column (volume, density) text table

    // Evaluator over volumes; table data interpolates log-linearly.
    std::function<Real(Real)> evaluator() const;
};

struct DaughterSpec {
    bool elastic = false;
    Real theta = 0.0;
    DaughterModel model() const {
        return elastic ? DaughterModel::elastic() : DaughterModel::power_law(theta);
    }
};

struct StudySpec {
    enum class Kind { None, Truncation, Analytic, Uniqueness };
    Kind kind = Kind::None;
    std::vector<Real> n_values;      // truncation study
    std::string scenario;            // analytic study
    Real epsilon = 1e-3;             // uniqueness perturbation
    Real contraction_slack = 0.05;
};

struct RunConfig {
    KernelVariant kernel_variant = KernelVariant::Constant;
    Real kernel_k = 1.0;
    GrowthBound bound; // k_bound, omega, sigma

    ProbabilityVariant prob_variant = ProbabilityVariant::ConstantE;
    Real prob_value = 1.0; // constant E, or scale for volume_dependent

    DaughterSpec daughter;

    Real grid_n = 100.0;
    int cells_per_decade = 8;

    InitialSpec initial;
    SolverConfig solver;

    std::vector<Real> extra_moments;
    Real tail_lambda = 1.0;
    Real mass_drift_tol = 1e-8;

    StudySpec study;

    KernelModel kernel_model() const;
    CoalescenceProbability probability_model() const;

    // Canonical flat-section text; parsing it back reproduces this config.
    std::string canonical_text() const;
    // FNV-1a hash of the canonical text.
    std::string hash() const;
};

// Initial state on a grid: cell averages for the smooth presets, a single
// loaded cell for the monodisperse preset.
State build_initial_state(const InitialSpec& spec, const Grid& grid,
                          Real quad_rel_tol = 1e-10);

struct ParseResult {
    std::optional<RunConfig> config;
    std::vector<std::string> errors;
    bool ok() const { return config.has_value() && errors.empty(); }
};

// Parses a flat-section document (named [sections], scalar keys, decimal
// numbers, '#' comments). All validation errors are collected, not only the
// first; infeasible parameter combinations cite the violated hypothesis.
ParseResult parse_config(const std::string& text);

ParseResult parse_config_file(const std::string& path);

} // namespace coagbreak

#endif
