#include "coagbreak/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coagbreak {

Real moment(const State& s, const Grid& grid, Real q) {
    if (s.g.size() != grid.size())
        throw std::invalid_argument("moment: state length does not match grid");
    Real acc = 0.0;
    for (Index i = 0; i < grid.size(); ++i)
        acc += std::pow(grid.pivot(i), q) * s.g[i] * grid.width(i);
    return acc;
}

MomentRecord moment_record(const State& s, const Grid& grid, Real sigma,
                           const std::vector<Real>& extra_exponents) {
    MomentRecord rec;
    rec.t = s.t;
    for (Real q : {-2.0 * sigma, -sigma, 0.0, 1.0})
        rec.values[q] = moment(s, grid, q);
    for (Real q : extra_exponents)
        if (!rec.values.count(q)) rec.values[q] = moment(s, grid, q);
    return rec;
}

Real s_norm(const State& s, const Grid& grid, Real sigma) {
    return moment(s, grid, 0.0) + moment(s, grid, 1.0) +
           moment(s, grid, -2.0 * sigma);
}

BoundCertificate bound_certificate(Real g_in_norm, Real k, Real omega, Real sigma,
                                   Real eta_two_sigma, Real t_end) {
    if (!(g_in_norm > 0.0 && k > 0.0 && eta_two_sigma > 0.0 && t_end >= 0.0) ||
        !(omega >= 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("bound_certificate: parameters must be positive");
    BoundCertificate cert;
    cert.available = true;
    cert.g_in_norm = g_in_norm;
    cert.horizon = t_end;
    const Real two_pow = std::pow(2.0, 2.0 * omega);
    cert.a = k * eta_two_sigma * two_pow * g_in_norm;
    cert.b = k * (eta_two_sigma / 2.0) * two_pow * g_in_norm * g_in_norm;
    const Real eat = std::exp(cert.a * t_end);
    cert.p1 = eat * g_in_norm + (cert.b / cert.a) * (eat - 1.0);
    cert.p = 2.0 * cert.p1 + 3.0 * g_in_norm;
    return cert;
}

BoundCheck check_bound(const Trajectory& traj, const Grid& grid, Real sigma,
                       const BoundCertificate& cert) {
    BoundCheck out;
    if (!cert.available) return out;
    out.pass = true;
    out.min_margin = std::numeric_limits<Real>::infinity();
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const Real margin = cert.p - s_norm(traj.states[i], grid, sigma);
        out.margins.push_back(margin);
        if (margin < out.min_margin) out.min_margin = margin;
        if (margin < 0.0 && out.first_violation < 0) {
            out.pass = false;
            out.first_violation = static_cast<Index>(i);
        }
    }
    return out;
}

TailMass tail_mass(const State& s, const Grid& grid, Real lambda, Real sigma,
                   Real m1_initial) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("tail_mass: lambda must be positive");
    TailMass out;
    for (Index i = 0; i < grid.size(); ++i) {
        const Real x = grid.pivot(i);
        if (x < lambda) continue;
        out.value += (1.0 + std::pow(x, -sigma)) * s.g[i] * grid.width(i);
    }
    out.majorant =
        (1.0 / lambda + std::pow(1.0 / lambda, sigma + 1.0)) * m1_initial;
    return out;
}

Real weighted_distance(const State& g, const State& h, const Grid& grid,
                       Real sigma) {
    if (g.g.size() != grid.size() || h.g.size() != grid.size())
        throw std::invalid_argument("weighted_distance: states must match the grid");
    Real acc = 0.0;
    for (Index i = 0; i < grid.size(); ++i)
        acc += (1.0 + std::pow(grid.pivot(i), -sigma)) *
               std::abs(g.g[i] - h.g[i]) * grid.width(i);
    return acc;
}

Real contraction_rate(Real g_sup, Real h_sup, Real k, Real eta_sigma) {
    if (!(g_sup >= 0.0 && h_sup >= 0.0 && k >= 0.0 && eta_sigma >= 0.0))
        throw std::invalid_argument("contraction_rate: nonnegative inputs required");
    return k * (2.0 * g_sup + 2.0 * h_sup + eta_sigma * g_sup +
                0.5 * eta_sigma * h_sup);
}

} // namespace coagbreak
