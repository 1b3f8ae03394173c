// Moments, weighted norms, a-priori bound certificates, and solution
// distances.
#ifndef COAGBREAK_DIAGNOSTICS_HPP
#define COAGBREAK_DIAGNOSTICS_HPP

#include <map>
#include <vector>

#include "coagbreak/grid.hpp"
#include "coagbreak/integrator.hpp"
#include "coagbreak/operators.hpp"
#include "coagbreak/types.hpp"

namespace coagbreak {

// M_q = sum_i x_i^q g_i Delta_i.
Real moment(const State& s, const Grid& grid, Real q);

struct MomentRecord {
    Real t = 0.0;
    std::map<Real, Real> values;
};

MomentRecord moment_record(const State& s, const Grid& grid, Real sigma,
                           const std::vector<Real>& extra_exponents = {});

// Solution-space norm M_0 + M_1 + M_{-2 sigma}.
Real s_norm(const State& s, const Grid& grid, Real sigma);

// Constants of the a-priori equi-boundedness estimate:
//   a = k eta(2s) 2^(2w) |g_in|,  b = k (eta(2s)/2) 2^(2w) |g_in|^2,
//   P1(T) = e^(aT) |g_in| + (b/a)(e^(aT)-1),  P(T) = 2 P1(T) + 3 |g_in|.
struct BoundCertificate {
    bool available = false;
    Real a = 0.0;
    Real b = 0.0;
    Real p1 = 0.0;
    Real p = 0.0;
    Real g_in_norm = 0.0;
    Real horizon = 0.0;
};

BoundCertificate bound_certificate(Real g_in_norm, Real k, Real omega, Real sigma,
                                   Real eta_two_sigma, Real t_end);

struct BoundCheck {
    bool pass = false;
    std::vector<Real> margins; // P(T) - |g(t)|_S per checkpoint
    Real min_margin = 0.0;
    Index first_violation = -1;
};

BoundCheck check_bound(const Trajectory& traj, const Grid& grid, Real sigma,
                       const BoundCertificate& cert);

struct TailMass {
    Real value = 0.0;    // sum over x_i >= lambda of (1 + x_i^-sigma) g_i Delta_i
    Real majorant = 0.0; // [1/lambda + (1/lambda)^(sigma+1)] M_1(g_in)
};

TailMass tail_mass(const State& s, const Grid& grid, Real lambda, Real sigma,
                   Real m1_initial);

// Weighted L1 distance sum (1 + x_i^-sigma) |g_i - h_i| Delta_i.
Real weighted_distance(const State& g, const State& h, const Grid& grid, Real sigma);

// Gronwall rate of the uniqueness contraction, from the trajectory suprema
// of the two solution norms:
//   C = k (2 gs + 2 hs + eta(s) gs + eta(s) hs / 2).
Real contraction_rate(Real g_sup, Real h_sup, Real k, Real eta_sigma);

} // namespace coagbreak

#endif
