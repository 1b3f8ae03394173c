// Experiment suites: truncation convergence, analytic-oracle comparison,
// and the uniqueness contraction measurement.
#ifndef COAGBREAK_STUDIES_HPP
#define COAGBREAK_STUDIES_HPP

#include <map>
#include <string>
#include <vector>

#include "coagbreak/config.hpp"
#include "coagbreak/diagnostics.hpp"

namespace coagbreak {

struct Verdict {
    std::string name;
    Real value = 0.0;
    Real threshold = 0.0;
    std::string relation; // "<=", "<", ">=", "decreasing", ...
    bool pass = false;
};

struct RunSummary {
    std::string label;
    Real sweep_value = 0.0;
    std::map<std::string, Real> metrics;
    StepStats steps;
};

struct StudyReport {
    std::string kind;
    std::string config_hash;
    bool asserted = true; // false: report-only (preconditions unmet)
    std::string notes;
    std::vector<RunSummary> runs;
    std::map<std::string, Real> derived;
    std::vector<Verdict> verdicts;
    std::vector<std::pair<Real, Real>> curve; // plot-ready (t, metric) rows
    std::string curve_name;

    bool all_pass() const;
};

// Builds grid, models, workspace and initial data from a config and runs it.
struct RunProducts {
    Grid grid;
    Trajectory trajectory;
    WorkspaceStats workspace_stats;
};

RunProducts execute_run(const RunConfig& cfg, int threads,
                        TensorNormalization norm = TensorNormalization::MassExact);

// Averages a finer piecewise-constant density over a coarser partition.
// Number and mass carried by the overlap are preserved exactly; fine-grid
// content outside the coarse domain is dropped.
State restrict_to_coarser(const Grid& fine, const State& fine_state,
                          const Grid& coarse);

// Runs the base scenario at every n and reports the successive
// common-domain distances between final states.
StudyReport truncation_sweep(const RunConfig& base, const std::vector<Real>& n_values,
                             int threads);

// Scenario oracles: "constant_kernel_pure_coag", "elastic_reduction",
// "pure_breakage". Unknown scenarios are a config error.
StudyReport analytic_compare(const RunConfig& base, const std::string& scenario,
                             int threads);

// Twin runs from g_in and (1+epsilon) g_in; measures the weighted distance
// against the Gronwall envelope with the measured-norm rate constant.
StudyReport uniqueness_experiment(const RunConfig& base, Real epsilon, int threads);

} // namespace coagbreak

#endif
