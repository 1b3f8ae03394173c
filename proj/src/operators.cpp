#include "coagbreak/operators.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "coagbreak/parallel.hpp"

namespace coagbreak {

namespace {

// Antiderivative of the power-law daughter density at fixed parents:
// integral_0^x P(mu | .; .) dmu with nu+tau = s.
Real daughter_number_below(Real theta, Real s, Real x) {
    return (theta + 2.0) * std::pow(x, theta + 1.0) /
           ((theta + 1.0) * std::pow(s, theta + 1.0));
}

} // namespace

OperatorWorkspace::OperatorWorkspace(const Grid& grid, const KernelModel& kernel,
                                     const CoalescenceProbability& prob,
                                     const DaughterModel& daughter,
                                     TensorNormalization norm)
    : grid_(grid), geometry_(pair_geometry(grid)) {
    const auto t0 = std::chrono::steady_clock::now();
    const Index m = grid_.size();
    const Vec& x = grid_.pivots();

    K_.resize(m, m);
    KE_.resize(m, m);
    KEp_.resize(m, m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = i; j < m; ++j) {
            const Real psi = kernel(x[i], x[j]);
            const Real e = prob(x[i], x[j]);
            K_(i, j) = psi;
            K_(j, i) = psi;
            KE_(i, j) = e * psi;
            KE_(j, i) = e * psi;
            KEp_(i, j) = (1.0 - e) * psi;
            KEp_(j, i) = (1.0 - e) * psi;
        }
    }

    const Index npairs = m * (m + 1) / 2;
    pair_i_.reserve(npairs);
    pair_j_.reserve(npairs);
    pair_sym_.reserve(npairs);
    coag_included_.reserve(npairs);
    break_included_.reserve(npairs);
    coag_rows_.resize(static_cast<std::size_t>(m));

    const bool breakage = !prob.is_always_one() && KEp_.cwiseAbs().maxCoeff() > 0.0;

    for (Index i = 0; i < m; ++i) {
        for (Index j = i; j < m; ++j) {
            const Index p = static_cast<Index>(pair_i_.size());
            pair_i_.push_back(i);
            pair_j_.push_back(j);
            pair_sym_.push_back(i == j ? 0.5 : 1.0);
            const bool in_coag = geometry_.included(i, j);
            const bool in_break = breakage && (x[i] + x[j] < grid_.truncation());
            coag_included_.push_back(in_coag ? 1 : 0);
            break_included_.push_back(in_break ? 1 : 0);
            if (in_coag) {
                const Index l = geometry_.target(i, j);
                const Real w = geometry_.weight(i, j);
                if (w > 0.0)
                    coag_rows_[static_cast<std::size_t>(l)].push_back({p, w});
                if (w < 1.0)
                    coag_rows_[static_cast<std::size_t>(l + 1)].push_back({p, 1.0 - w});
            }
        }
    }

    pair_counts_ = Vec::Zero(npairs);
    if (breakage) {
        fragment_tensor_.setZero(m, npairs);
        for (Index p = 0; p < npairs; ++p) {
            if (!break_included_[static_cast<std::size_t>(p)]) continue;
            const Index i = pair_i_[static_cast<std::size_t>(p)];
            const Index j = pair_j_[static_cast<std::size_t>(p)];
            const Real s = x[i] + x[j];
            if (daughter.is_elastic()) {
                fragment_tensor_(i, p) += 1.0;
                fragment_tensor_(j, p) += 1.0;
                pair_counts_[p] = 2.0;
                continue;
            }
            const Real theta = daughter.theta();
            Real mass = 0.0;
            Real count = 0.0;
            for (Index l = 0; l < m; ++l) {
                const Real lo = grid_.left(l);
                if (lo >= s) break;
                const Real hi = std::min(grid_.right(l), s);
                const Real entry = daughter_number_below(theta, s, hi) -
                                   daughter_number_below(theta, s, lo);
                fragment_tensor_(l, p) = entry;
                mass += entry * x[l];
                count += entry;
            }
            const Real want = norm == TensorNormalization::MassExact
                                  ? s / mass
                                  : daughter.fragment_count() / count;
            fragment_tensor_.col(p) *= want;
            pair_counts_[p] = fragment_tensor_.col(p).sum();
        }
    }

    // Death matrix: a cell dies through every collision channel its pair map
    // admits; the masks mirror the birth-side inclusion exactly so the rhs
    // is mass-neutral term by term.
    death_.setZero(m, m);
    for (Index p = 0; p < npairs; ++p) {
        const Index i = pair_i_[static_cast<std::size_t>(p)];
        const Index j = pair_j_[static_cast<std::size_t>(p)];
        Real v = 0.0;
        if (coag_included_[static_cast<std::size_t>(p)]) v += KE_(i, j);
        if (break_included_[static_cast<std::size_t>(p)]) v += KEp_(i, j);
        death_(i, j) = v;
        death_(j, i) = v;
    }

    stats_.cells = m;
    stats_.pairs_total = npairs;
    for (Index p = 0; p < npairs; ++p) {
        stats_.pairs_coag += coag_included_[static_cast<std::size_t>(p)] ? 1 : 0;
        stats_.pairs_break += break_included_[static_cast<std::size_t>(p)] ? 1 : 0;
    }
    stats_.tensor_bytes = static_cast<std::size_t>(fragment_tensor_.size()) * sizeof(Real);
    stats_.assembly_seconds =
        std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
}

Vec OperatorWorkspace::apply(const State& s) const {
    const Index m = grid_.size();
    if (s.g.size() != m)
        throw std::invalid_argument("apply_rhs: state length does not match grid");

    const Vec G = s.g * grid_.widths(); // per-cell particle numbers
    const Index npairs = pair_count();

    Vec qc = Vec::Zero(npairs);
    Vec qb = Vec::Zero(npairs);
    for (Index p = 0; p < npairs; ++p) {
        const Index i = pair_i_[static_cast<std::size_t>(p)];
        const Index j = pair_j_[static_cast<std::size_t>(p)];
        const Real gg = pair_sym_[static_cast<std::size_t>(p)] * G[i] * G[j];
        qc[p] = KE_(i, j) * gg;
        qb[p] = KEp_(i, j) * gg;
    }

    Vec dg(m);
    const bool breakage = breakage_active();
    parallel_for(Index{0}, m, threads_, [&](Index l) {
        Real birth = 0.0;
        for (const BirthEntry& e : coag_rows_[static_cast<std::size_t>(l)])
            birth += e.frac * qc[e.pair];
        if (breakage)
            birth += fragment_tensor_.row(l).dot(qb.matrix());
        const Real death = s.g[l] * death_.row(l).dot(G.matrix());
        dg[l] = birth / grid_.width(l) - death;
    });
    return dg;
}

std::pair<Real, Real> OperatorWorkspace::number_balance(const State& s) const {
    const Index m = grid_.size();
    if (s.g.size() != m)
        throw std::invalid_argument("number_balance: state length does not match grid");
    const Vec G = s.g * grid_.widths();
    Real coag_loss = 0.0;
    Real break_gain = 0.0;
    for (Index p = 0; p < pair_count(); ++p) {
        const Index i = pair_i_[static_cast<std::size_t>(p)];
        const Index j = pair_j_[static_cast<std::size_t>(p)];
        const Real gg = pair_sym_[static_cast<std::size_t>(p)] * G[i] * G[j];
        if (coag_included_[static_cast<std::size_t>(p)])
            coag_loss -= KE_(i, j) * gg;
        if (break_included_[static_cast<std::size_t>(p)])
            break_gain += (pair_counts_[p] - 2.0) * KEp_(i, j) * gg;
    }
    return {coag_loss, break_gain};
}

} // namespace coagbreak
