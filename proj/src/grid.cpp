#include "coagbreak/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coagbreak {

Grid::Grid(Real n, int cells_per_decade) : n_(n), cpd_(cells_per_decade) {
    if (!(n > 1.0) || !std::isfinite(n))
        throw std::domain_error("grid truncation parameter n must exceed 1");
    if (cells_per_decade < 1)
        throw std::domain_error("cells_per_decade must be >= 1");

    const Real span_decades = 2.0 * std::log10(n);
    const Index m = static_cast<Index>(std::ceil(span_decades * cells_per_decade));

    edges_.resize(m + 1);
    const Real log_lo = -std::log(n);
    const Real log_hi = std::log(n);
    for (Index i = 0; i <= m; ++i) {
        const Real f = static_cast<Real>(i) / static_cast<Real>(m);
        edges_[i] = std::exp(log_lo + f * (log_hi - log_lo));
    }
    edges_[0] = 1.0 / n;
    edges_[m] = n;

    pivots_.resize(m);
    widths_.resize(m);
    for (Index i = 0; i < m; ++i) {
        pivots_[i] = std::sqrt(edges_[i] * edges_[i + 1]);
        widths_[i] = edges_[i + 1] - edges_[i];
    }
}

std::optional<Index> Grid::locate(Real mu) const {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw std::domain_error("locate: volume must be positive and finite");
    if (mu < edges_[0] || mu >= edges_[edges_.size() - 1]) return std::nullopt;
    const Real* begin = edges_.data();
    const Real* end = edges_.data() + edges_.size();
    const Real* it = std::upper_bound(begin, end, mu);
    return static_cast<Index>(it - begin) - 1;
}

Grid build_grid(Real n, int cells_per_decade) { return {n, cells_per_decade}; }

PairGeometry pair_geometry(const Grid& grid) {
    const Index m = grid.size();
    PairGeometry geo;
    geo.target.setConstant(m, m, -1);
    geo.weight.setZero(m, m);

    const Vec& x = grid.pivots();
    const Real last_pivot = x[m - 1];
    for (Index i = 0; i < m; ++i) {
        for (Index j = i; j < m; ++j) {
            const Real s = x[i] + x[j];
            if (s >= grid.truncation() || s > last_pivot) continue;
            // largest l with x_l <= s; s >= 2*x_0 > x_0 so l >= 0
            const Real* begin = x.data();
            const Real* it = std::upper_bound(begin, begin + m, s);
            Index l = static_cast<Index>(it - begin) - 1;
            Real w = 1.0;
            if (s > x[l]) {
                w = (x[l + 1] - s) / (x[l + 1] - x[l]);
            }
            geo.target(i, j) = l;
            geo.target(j, i) = l;
            geo.weight(i, j) = w;
            geo.weight(j, i) = w;
        }
    }
    return geo;
}

} // namespace coagbreak
