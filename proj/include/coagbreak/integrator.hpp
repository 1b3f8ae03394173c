// Adaptive positivity-preserving time integration of the truncated system.
#ifndef COAGBREAK_INTEGRATOR_HPP
#define COAGBREAK_INTEGRATOR_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coagbreak/operators.hpp"
#include "coagbreak/types.hpp"

namespace coagbreak {

struct SolverConfig {
    Real t_end = 1.0;
    Real rel_tol = 1e-8;
    Real abs_tol = 1e-12;
    Real dt_init = 1e-3;
    Real dt_min = 1e-12;
    Real dt_max = 1.0;
    // Components in [-clip, 0) are zeroed on acceptance; anything below
    // -clip rejects the step. clip <= 0 selects 1e-14 * max(state).
    Real negativity_clip = -1.0;
    std::vector<Real> output_times; // empty: uniform checkpoints
    int checkpoints = 11;

    void validate() const;
};

struct StepStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
    Real dt_smallest = 0.0;
    Real dt_largest = 0.0;
};

struct Trajectory {
    std::vector<State> states; // at the checkpoint times, first t=0, last t=t_end
    StepStats steps;

    const State& initial() const { return states.front(); }
    const State& final_state() const { return states.back(); }
};

// Unrecoverable integration failure (persistent rejection at dt_min, or a
// non-finite state); carries the time and a dump of the offending step.
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& what, Real t, Real dt)
        : std::runtime_error(what), time(t), step_size(dt) {}
    Real time;
    Real step_size;
};

// Cell averages of a nonnegative density over the grid, zero outside
// [1/n, n]. Averages use adaptive quadrature per cell.
State truncate_initial(const std::function<Real(Real)>& g_in, const Grid& grid,
                       Real quad_rel_tol = 1e-10);

struct StepResult {
    State state;       // candidate (clipped if accepted)
    Real error = 0.0;  // embedded-pair norm, accept iff <= 1
    bool accepted = false;
};

// One trial step of the embedded Bogacki-Shampine 3(2) pair.
StepResult step(const OperatorWorkspace& ws, const State& s, Real dt,
                const SolverConfig& cfg);

// Integrates to t_end, recording checkpoints by third-order dense output.
Trajectory run(const OperatorWorkspace& ws, const State& initial,
               const SolverConfig& cfg);

} // namespace coagbreak

#endif
