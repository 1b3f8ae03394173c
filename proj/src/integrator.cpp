#include "coagbreak/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coagbreak/quadrature.hpp"

namespace coagbreak {

namespace {

constexpr Real kSafety = 0.9;
constexpr Real kShrinkMin = 0.1;
constexpr Real kGrowMax = 5.0;

Real resolve_clip(const SolverConfig& cfg, const Vec& candidate) {
    if (cfg.negativity_clip > 0.0) return cfg.negativity_clip;
    const Real mx = candidate.size() ? candidate.abs().maxCoeff() : 0.0;
    return 1e-14 * mx;
}

Real error_norm(const Vec& err, const Vec& y0, const Vec& y1,
                const SolverConfig& cfg) {
    if (err.size() == 0) return 0.0;
    Real acc = 0.0;
    for (Index i = 0; i < err.size(); ++i) {
        const Real scale =
            cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const Real r = err[i] / scale;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<Real>(err.size()));
}

struct TrialStep {
    Vec y1;   // third-order candidate
    Vec k1;   // derivative at entry (FSAL input)
    Vec k4;   // derivative at the candidate (FSAL output)
    Real error = 0.0;
};

// One Bogacki-Shampine 3(2) stage sweep; k1 may be supplied from FSAL reuse.
TrialStep bs23_trial(const OperatorWorkspace& ws, const State& s, Real dt,
                     const SolverConfig& cfg, const Vec* k1_reuse,
                     long& rhs_evals) {
    TrialStep out;
    State scratch;
    scratch.t = s.t;
    if (k1_reuse) {
        out.k1 = *k1_reuse;
    } else {
        out.k1 = ws.apply(s);
        ++rhs_evals;
    }
    scratch.g = s.g + (0.5 * dt) * out.k1;
    scratch.t = s.t + 0.5 * dt;
    const Vec k2 = ws.apply(scratch);
    scratch.g = s.g + (0.75 * dt) * k2;
    scratch.t = s.t + 0.75 * dt;
    const Vec k3 = ws.apply(scratch);
    out.y1 = s.g + dt * ((2.0 / 9.0) * out.k1 + (1.0 / 3.0) * k2 + (4.0 / 9.0) * k3);
    scratch.g = out.y1;
    scratch.t = s.t + dt;
    out.k4 = ws.apply(scratch);
    rhs_evals += 3;
    const Vec err = dt * ((-5.0 / 72.0) * out.k1 + (1.0 / 12.0) * k2 +
                          (1.0 / 9.0) * k3 - (1.0 / 8.0) * out.k4);
    out.error = error_norm(err, s.g, out.y1, cfg);
    return out;
}

// Clips round-off undershoot to zero. Returns false when a component is
// negative beyond the clip threshold (scheme failure, caller must reject).
bool clip_negatives(Vec& g, Real clip) {
    bool ok = true;
    for (Index i = 0; i < g.size(); ++i) {
        if (g[i] < 0.0) {
            if (g[i] < -clip) ok = false;
            g[i] = 0.0;
        }
    }
    return ok;
}

// Third-order dense output: cubic Hermite on the accepted step.
Vec hermite(const Vec& y0, const Vec& f0, const Vec& y1, const Vec& f1,
            Real dt, Real theta) {
    const Real t2 = theta * theta;
    const Real t3 = t2 * theta;
    const Real h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const Real h10 = t3 - 2.0 * t2 + theta;
    const Real h01 = -2.0 * t3 + 3.0 * t2;
    const Real h11 = t3 - t2;
    return h00 * y0 + (h10 * dt) * f0 + h01 * y1 + (h11 * dt) * f1;
}

} // namespace

void SolverConfig::validate() const {
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
    if (!(rel_tol > 0.0 && abs_tol > 0.0))
        throw std::invalid_argument("tolerances must be positive");
    if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
        throw std::invalid_argument("require 0 < dt_min <= dt_init <= dt_max");
    if (checkpoints < 2 && output_times.empty() && t_end > 0.0)
        throw std::invalid_argument("need at least 2 checkpoints");
}

State truncate_initial(const std::function<Real(Real)>& g_in, const Grid& grid,
                       Real quad_rel_tol) {
    auto checked = [&](Real mu) {
        const Real v = g_in(mu);
        if (v < 0.0 || !std::isfinite(v))
            throw std::invalid_argument("initial data must be nonnegative and finite");
        return v;
    };
    State s;
    s.t = 0.0;
    s.g.resize(grid.size());
    for (Index i = 0; i < grid.size(); ++i) {
        const Real cell = integrate(checked, grid.left(i), grid.right(i), quad_rel_tol);
        s.g[i] = std::max(cell, 0.0) / grid.width(i);
    }
    return s;
}

StepResult step(const OperatorWorkspace& ws, const State& s, Real dt,
                const SolverConfig& cfg) {
    if (s.g.size() != ws.grid().size())
        throw std::invalid_argument("step: state length does not match workspace");
    long evals = 0;
    TrialStep trial = bs23_trial(ws, s, dt, cfg, nullptr, evals);
    StepResult out;
    out.error = trial.error;
    out.state.t = s.t + dt;
    out.state.g = std::move(trial.y1);
    if (!out.state.g.allFinite()) {
        out.accepted = false;
        out.error = std::numeric_limits<Real>::infinity();
        return out;
    }
    if (trial.error > 1.0) {
        out.accepted = false;
        return out;
    }
    out.accepted = clip_negatives(out.state.g, resolve_clip(cfg, out.state.g));
    return out;
}

Trajectory run(const OperatorWorkspace& ws, const State& initial,
               const SolverConfig& cfg) {
    cfg.validate();
    if (initial.g.size() != ws.grid().size())
        throw std::invalid_argument("run: initial state length does not match workspace");
    if (!initial.g.allFinite() || (initial.g < 0.0).any())
        throw std::invalid_argument("run: initial state must be finite and nonnegative");

    std::vector<Real> times = cfg.output_times;
    if (times.empty()) {
        times.reserve(static_cast<std::size_t>(cfg.checkpoints));
        for (int i = 0; i < cfg.checkpoints; ++i)
            times.push_back(cfg.t_end * static_cast<Real>(i) /
                            static_cast<Real>(cfg.checkpoints - 1));
    }
    if (times.front() != 0.0) times.insert(times.begin(), 0.0);
    if (times.back() != cfg.t_end) times.push_back(cfg.t_end);
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("output times must be strictly increasing");
    if (times.back() > cfg.t_end)
        throw std::invalid_argument("output times must not exceed t_end");

    Trajectory traj;
    State current = initial;
    current.t = 0.0;
    traj.states.push_back(current);
    std::size_t next_out = 1;

    if (cfg.t_end == 0.0) return traj;

    Real dt = cfg.dt_init;
    Vec k1;
    bool have_k1 = false;
    long& evals = traj.steps.rhs_evaluations;

    while (current.t < cfg.t_end) {
        const Real remaining = cfg.t_end - current.t;
        const Real h = std::min(dt, remaining);
        if (!have_k1) {
            k1 = ws.apply(current);
            ++evals;
            have_k1 = true;
        }
        TrialStep trial = bs23_trial(ws, current, h, cfg, &k1, evals);

        bool accept = trial.y1.allFinite() && trial.error <= 1.0;
        bool negativity_reject = false;
        Vec candidate;
        if (accept) {
            candidate = trial.y1;
            if (!clip_negatives(candidate, resolve_clip(cfg, candidate))) {
                accept = false;
                negativity_reject = true;
            }
        }

        if (!accept) {
            ++traj.steps.rejected;
            if (h <= cfg.dt_min)
                throw SolverError(
                    "stiffness failure: step rejected at the minimum step size",
                    current.t, h);
            Real shrink;
            if (negativity_reject) {
                shrink = 0.5;
            } else if (!trial.y1.allFinite() || !(trial.error > 0.0) ||
                       !std::isfinite(trial.error)) {
                shrink = 0.5;
            } else {
                shrink = std::max(kShrinkMin,
                                  kSafety * std::pow(trial.error, -1.0 / 3.0));
                shrink = std::min(shrink, 0.9);
            }
            dt = std::max(cfg.dt_min, h * shrink);
            have_k1 = true; // k1 still valid at the unchanged state
            continue;
        }

        // Dense output for checkpoints inside (t, t+h).
        const Real t_new = current.t + h;
        while (next_out < times.size() && times[next_out] <= t_new + 1e-14 * cfg.t_end) {
            const Real tc = times[next_out];
            State snap;
            snap.t = tc;
            if (tc >= t_new) {
                snap.g = candidate;
            } else {
                const Real theta = (tc - current.t) / h;
                snap.g = hermite(current.g, trial.k1, trial.y1, trial.k4, h, theta);
                clip_negatives(snap.g, resolve_clip(cfg, snap.g));
            }
            if (!snap.g.allFinite())
                throw SolverError("non-finite state at checkpoint", tc, h);
            traj.states.push_back(std::move(snap));
            ++next_out;
        }

        ++traj.steps.accepted;
        traj.steps.dt_smallest = traj.steps.dt_smallest == 0.0
                                     ? h
                                     : std::min(traj.steps.dt_smallest, h);
        traj.steps.dt_largest = std::max(traj.steps.dt_largest, h);

        current.g = std::move(candidate);
        current.t = t_new;
        // FSAL: derivative at the accepted candidate opens the next step.
        // Clipping can perturb the state the derivative was computed at, but
        // only by amounts below the clip threshold.
        k1 = std::move(trial.k4);
        have_k1 = true;

        const Real grow =
            trial.error > 0.0
                ? std::clamp(kSafety * std::pow(trial.error, -1.0 / 3.0), 0.2, kGrowMax)
                : kGrowMax;
        dt = std::min(cfg.dt_max, std::max(cfg.dt_min, h * grow));

        if (!current.g.allFinite())
            throw SolverError("non-finite state after accepted step", current.t, h);
    }

    // The loop emits the final checkpoint when the last step lands on t_end.
    if (traj.states.back().t != cfg.t_end) {
        State snap = current;
        snap.t = cfg.t_end;
        traj.states.push_back(std::move(snap));
    }
    return traj;
}

} // namespace coagbreak
