// Geometric partition of the truncated volume domain [1/n, n].
#ifndef COAGBREAK_GRID_HPP
#define COAGBREAK_GRID_HPP

#include <optional>

#include "coagbreak/types.hpp"

namespace coagbreak {

// Immutable geometric cell mesh. Edges run from 1/n to n with a constant
// ratio; the representative volume of a cell is the geometric mean of its
// edges. Bottom edges are inclusive, top edges exclusive.
class Grid {
  public:
    Grid(Real n, int cells_per_decade);

    Real truncation() const { return n_; }
    int cells_per_decade() const { return cpd_; }
    Index size() const { return pivots_.size(); }

    const Vec& edges() const { return edges_; }     // size() + 1 entries
    const Vec& pivots() const { return pivots_; }   // x_i
    const Vec& widths() const { return widths_; }   // Delta_i

    Real left(Index i) const { return edges_[i]; }
    Real right(Index i) const { return edges_[i + 1]; }
    Real pivot(Index i) const { return pivots_[i]; }
    Real width(Index i) const { return widths_[i]; }

    // Cell index with left <= mu < right, or nullopt when mu < 1/n or
    // mu >= n (the zero-extension region).
    std::optional<Index> locate(Real mu) const;

  private:
    Real n_;
    int cpd_;
    Vec edges_;
    Vec pivots_;
    Vec widths_;
};

Grid build_grid(Real n, int cells_per_decade);

inline std::optional<Index> locate_cell(const Grid& grid, Real mu) {
    return grid.locate(mu);
}

// Two-pivot splitting of coalescence aggregates. An included pair (i, j)
// has x_i + x_j bracketed by pivots (cell, cell+1); the convex weight on the
// lower pivot preserves both fragment number and mass:
//   w x_l + (1-w) x_{l+1} = x_i + x_j,  w in [0, 1].
// Pairs whose sum exceeds the last pivot cannot be split that way and are
// excluded, as are pairs at or beyond the truncation volume n.
struct PairGeometry {
    Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> target; // -1 = excluded
    Mat weight;

    bool included(Index i, Index j) const { return target(i, j) >= 0; }
};

PairGeometry pair_geometry(const Grid& grid);

} // namespace coagbreak

#endif
