// Discrete coagulation / collisional-breakage right-hand side on a grid.
#ifndef COAGBREAK_OPERATORS_HPP
#define COAGBREAK_OPERATORS_HPP

#include <cstdint>
#include <vector>

#include "coagbreak/grid.hpp"
#include "coagbreak/kernels.hpp"
#include "coagbreak/types.hpp"

namespace coagbreak {

// Cell-averaged number densities plus a time stamp.
struct State {
    Vec g;
    Real t = 0.0;
};

// How the per-pair fragment tensor is normalized after the closed-form cell
// integrals. Mass-exact scaling makes the discrete mass identity
//   sum_l b[l] x_l = x_i + x_j
// hold exactly and is the production default; count-exact scaling instead
// pins sum_l b[l] = N and is used by tests that assert fragment-number
// monotonicity.
enum class TensorNormalization { MassExact, CountExact };

struct WorkspaceStats {
    Index cells = 0;
    long pairs_total = 0;
    long pairs_coag = 0;
    long pairs_break = 0;
    std::size_t tensor_bytes = 0;
    Real assembly_seconds = 0.0;
};

// Precomputed kernel matrices, pair splitting geometry, and the fragment
// redistribution tensor. Immutable after assembly; apply() is pure and
// bit-deterministic for any thread count (fixed per-cell summation order,
// parallelism only across output cells).
class OperatorWorkspace {
  public:
    OperatorWorkspace(const Grid& grid, const KernelModel& kernel,
                      const CoalescenceProbability& prob,
                      const DaughterModel& daughter,
                      TensorNormalization norm = TensorNormalization::MassExact);

    const Grid& grid() const { return grid_; }
    const Mat& kernel_matrix() const { return K_; }
    const Mat& coalescence_matrix() const { return KE_; }
    const Mat& breakage_matrix() const { return KEp_; }
    const PairGeometry& pairs() const { return geometry_; }
    const WorkspaceStats& stats() const { return stats_; }
    bool breakage_active() const { return fragment_tensor_.size() > 0; }

    Index pair_count() const { return static_cast<Index>(pair_i_.size()); }
    Index pair_i(Index p) const { return pair_i_[static_cast<std::size_t>(p)]; }
    Index pair_j(Index p) const { return pair_j_[static_cast<std::size_t>(p)]; }
    bool pair_in_coag(Index p) const { return coag_included_[static_cast<std::size_t>(p)]; }
    bool pair_in_break(Index p) const { return break_included_[static_cast<std::size_t>(p)]; }

    // Fragment tensor entry b[l][i][j] for the ordered pair p = (i <= j).
    Real fragment_tensor(Index l, Index p) const { return fragment_tensor_(l, p); }
    // Discrete fragment count sum_l b[l][i][j] of pair p.
    Real fragment_count_of_pair(Index p) const { return pair_counts_[p]; }

    void set_threads(int threads) { threads_ = threads < 1 ? 1 : threads; }
    int threads() const { return threads_; }

    // Time derivative of the cell-averaged densities.
    Vec apply(const State& s) const;

    // Signed contributions to dM_0/dt: coalescence loss (<= 0) and breakage
    // gain (>= 0 whenever the discrete fragment counts stay >= 2).
    std::pair<Real, Real> number_balance(const State& s) const;

  private:
    Grid grid_;
    Mat K_, KE_, KEp_;
    Mat death_; // per-row masked KE + KE', contracted against g*Delta
    PairGeometry geometry_;
    std::vector<Index> pair_i_, pair_j_;
    std::vector<Real> pair_sym_;
    std::vector<std::uint8_t> coag_included_, break_included_;
    struct BirthEntry {
        Index pair;
        Real frac;
    };
    std::vector<std::vector<BirthEntry>> coag_rows_;
    Mat fragment_tensor_; // cells x pairs, empty when breakage is inactive
    Vec pair_counts_;
    WorkspaceStats stats_;
    int threads_ = 1;
};

inline OperatorWorkspace assemble(const Grid& grid, const KernelModel& kernel,
                                  const CoalescenceProbability& prob,
                                  const DaughterModel& daughter,
                                  TensorNormalization norm = TensorNormalization::MassExact) {
    return {grid, kernel, prob, daughter, norm};
}

inline Vec apply_rhs(const OperatorWorkspace& ws, const State& s) {
    return ws.apply(s);
}

inline std::pair<Real, Real> number_balance_rate(const OperatorWorkspace& ws,
                                                 const State& s) {
    return ws.number_balance(s);
}

} // namespace coagbreak

#endif
