// Adaptive Simpson quadrature for cell averages of initial data.
#ifndef COAGBREAK_QUADRATURE_HPP
#define COAGBREAK_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

#include "coagbreak/types.hpp"

namespace coagbreak {

namespace detail {

template <class Fn>
Real simpson_recurse(const Fn& f, Real a, Real b, Real fa, Real fm, Real fb,
                     Real whole, Real tol, int depth) {
    const Real m = 0.5 * (a + b);
    const Real lm = 0.5 * (a + m);
    const Real rm = 0.5 * (m + b);
    const Real flm = f(lm);
    const Real frm = f(rm);
    const Real h = b - a;
    const Real left = h / 12.0 * (fa + 4.0 * flm + fm);
    const Real right = h / 12.0 * (fm + 4.0 * frm + fb);
    const Real delta = left + right - whole;
    if (depth <= 0) return left + right + delta / 15.0;
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Integrates f over [a, b] to the requested tolerance relative to a running
// magnitude estimate. The integrand must be finite on the closed interval.
template <class Fn>
Real integrate(const Fn& f, Real a, Real b, Real rel_tol = 1e-10,
               int max_depth = 48) {
    if (!(b >= a)) throw std::invalid_argument("integrate: b < a");
    if (a == b) return 0.0;
    const Real fa = f(a);
    const Real fb = f(b);
    const Real fm = f(0.5 * (a + b));
    const Real whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const Real scale = std::max(std::abs(whole), (b - a) * 1e-300);
    return detail::simpson_recurse(f, a, b, fa, fm, fb, whole,
                                   rel_tol * scale, max_depth);
}

} // namespace coagbreak

#endif
