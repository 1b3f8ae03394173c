#include <doctest.h>

#include <cmath>
#include <random>

#include "coagbreak/operators.hpp"
#include "oracles.hpp"

using namespace coagbreak;

namespace {
GrowthBound bound(Real k, Real omega, Real sigma) { return {k, omega, sigma}; }

OperatorWorkspace default_ws(const Grid& grid, Real e_value, Real theta,
                             TensorNormalization norm = TensorNormalization::MassExact) {
    return {grid, KernelModel::kinetic_theory(1.0, bound(1.0, 0.5, 0.2)),
            CoalescenceProbability::constant(e_value),
            DaughterModel::power_law(theta), norm};
}
} // namespace

TEST_CASE("full coalescence disables the breakage tensor") {
    const Grid grid = build_grid(10.0, 1);
    const OperatorWorkspace ws(grid, KernelModel::constant(1.0, bound(1.0, 0.3, 0.2)),
                               CoalescenceProbability::constant(1.0),
                               DaughterModel::power_law(0.0));
    CHECK_FALSE(ws.breakage_active());
    CHECK(ws.stats().tensor_bytes == 0);
    for (Index i = 0; i < grid.size(); ++i)
        for (Index j = 0; j < grid.size(); ++j) {
            CHECK(ws.coalescence_matrix()(i, j) == 1.0);
            CHECK(ws.breakage_matrix()(i, j) == 0.0);
        }
}

TEST_CASE("kernel matrices are symmetric and split exactly") {
    const Grid grid = build_grid(50.0, 4);
    const OperatorWorkspace ws = default_ws(grid, 0.4, -0.5);
    const Index m = grid.size();
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) {
            CHECK(ws.kernel_matrix()(i, j) == ws.kernel_matrix()(j, i));
            CHECK(ws.coalescence_matrix()(i, j) + ws.breakage_matrix()(i, j) ==
                  ws.kernel_matrix()(i, j));
            CHECK(ws.kernel_matrix()(i, j) >= 0.0);
        }
}

TEST_CASE("mass-exact tensor reproduces the pair mass identity") {
    for (Real theta : {0.0, -0.5, -0.9}) {
        const Grid grid = build_grid(100.0, 4);
        const OperatorWorkspace ws = default_ws(grid, 0.5, theta);
        REQUIRE(ws.breakage_active());
        for (Index p = 0; p < ws.pair_count(); ++p) {
            if (!ws.pair_in_break(p)) continue;
            const Real s = grid.pivot(ws.pair_i(p)) + grid.pivot(ws.pair_j(p));
            Real mass = 0.0;
            for (Index l = 0; l < grid.size(); ++l) {
                CHECK(ws.fragment_tensor(l, p) >= 0.0);
                mass += ws.fragment_tensor(l, p) * grid.pivot(l);
            }
            CHECK(mass == doctest::Approx(s).epsilon(1e-12));
        }
    }
}

TEST_CASE("count-exact tensor reproduces the fragment count") {
    const Grid grid = build_grid(100.0, 4);
    const Real theta = -0.5;
    const OperatorWorkspace ws =
        default_ws(grid, 0.5, theta, TensorNormalization::CountExact);
    const Real n_expected = DaughterModel::power_law(theta).fragment_count();
    for (Index p = 0; p < ws.pair_count(); ++p) {
        if (!ws.pair_in_break(p)) continue;
        CHECK(ws.fragment_count_of_pair(p) ==
              doctest::Approx(n_expected).epsilon(1e-12));
    }
}

TEST_CASE("uniform daughters fill cells proportionally to overlap") {
    // theta = 0: the density is flat, so tensor entries for cells entirely
    // below the pair volume scale with the cell widths.
    const Grid grid = build_grid(30.0, 2);
    const OperatorWorkspace ws = default_ws(grid, 0.0, 0.0);
    for (Index p = 0; p < ws.pair_count(); ++p) {
        if (!ws.pair_in_break(p)) continue;
        const Real s = grid.pivot(ws.pair_i(p)) + grid.pivot(ws.pair_j(p));
        for (Index l = 1; l < grid.size(); ++l) {
            if (grid.right(l) >= s) break;
            const Real expected = grid.width(l) / grid.width(0);
            CHECK(ws.fragment_tensor(l, p) / ws.fragment_tensor(0, p) ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("zero state has zero derivative") {
    const Grid grid = build_grid(20.0, 3);
    const OperatorWorkspace ws = default_ws(grid, 0.5, -0.5);
    State s;
    s.g = Vec::Zero(grid.size());
    const Vec dg = ws.apply(s);
    CHECK(dg.abs().maxCoeff() == 0.0);
}

TEST_CASE("state length mismatch is a contract violation") {
    const Grid grid = build_grid(20.0, 3);
    const OperatorWorkspace ws = default_ws(grid, 0.5, -0.5);
    State s;
    s.g = Vec::Ones(grid.size() + 1);
    CHECK_THROWS(ws.apply(s));
    CHECK_THROWS(ws.number_balance(s));
}

TEST_CASE("right-hand side matches the naive triple-loop oracle") {
    std::mt19937_64 rng(99);
    struct Scenario {
        Real n;
        int cpd;
        Real e;
        Real theta;
    };
    const Scenario scenarios[] = {
        {10.0, 1, 1.0, 0.0},   {10.0, 2, 0.5, -0.5}, {30.0, 2, 0.0, 0.0},
        {100.0, 2, 0.5, -0.9}, {16.0, 2, 0.3, -0.2},
    };
    for (const auto& sc : scenarios) {
        const Grid grid = build_grid(sc.n, sc.cpd);
        REQUIRE(grid.size() <= 8);
        const auto kernel = KernelModel::kinetic_theory(1.0, bound(1.0, 0.5, 0.2));
        const auto prob = CoalescenceProbability::constant(sc.e);
        const auto daughter = DaughterModel::power_law(sc.theta);
        const OperatorWorkspace ws(grid, kernel, prob, daughter);
        const oracles::BruteForceRhs brute(grid, kernel, prob, daughter);
        for (int trial = 0; trial < 25; ++trial) {
            const State s = oracles::random_state(grid, rng, 2.0);
            const Vec fast = ws.apply(s);
            const Vec slow = brute.apply(s);
            const Real scale = std::max(fast.abs().maxCoeff(), slow.abs().maxCoeff());
            for (Index l = 0; l < grid.size(); ++l)
                CHECK(std::abs(fast[l] - slow[l]) <= 1e-12 * std::max(scale, 1e-300));
        }
    }
}

TEST_CASE("the right-hand side is exactly mass neutral") {
    std::mt19937_64 rng(123);
    const Grid grid = build_grid(100.0, 6);
    for (Real e : {1.0, 0.5, 0.0}) {
        const OperatorWorkspace ws = default_ws(grid, e, -0.5);
        for (int trial = 0; trial < 100; ++trial) {
            const State s = oracles::random_state(grid, rng);
            const Vec dg = ws.apply(s);
            Real total = 0.0, scale = 0.0;
            for (Index l = 0; l < grid.size(); ++l) {
                const Real term = grid.pivot(l) * grid.width(l) * dg[l];
                total += term;
                scale = std::max(scale, std::abs(term));
            }
            CHECK(std::abs(total) <= 1e-12 * std::max(scale, 1e-300));
        }
    }
}

TEST_CASE("death coefficients are all nonnegative, so death is monotone") {
    std::mt19937_64 rng(7);
    const Grid grid = build_grid(50.0, 3);
    const OperatorWorkspace ws = default_ws(grid, 0.5, -0.5);
    const Index m = grid.size();
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) {
            CHECK(ws.kernel_matrix()(i, j) >= 0.0);
            CHECK(ws.coalescence_matrix()(i, j) >= 0.0);
            CHECK(ws.breakage_matrix()(i, j) >= 0.0);
        }
    // functional consequence through the number balance: growing any
    // density can only accelerate the coalescence number loss
    const State base = oracles::random_state(grid, rng);
    const auto [loss_base, gain_base] = ws.number_balance(base);
    for (Index j = 0; j < m; ++j) {
        State bumped = base;
        bumped.g[j] += 1.0;
        const auto [loss, gain] = ws.number_balance(bumped);
        CHECK(loss <= loss_base + 1e-15);
        CHECK(gain >= gain_base - 1e-15);
    }
}

TEST_CASE("number balance matches hand computations on two cells") {
    const Grid grid = build_grid(10.0, 1);
    const OperatorWorkspace ws(grid, KernelModel::constant(1.0, bound(1.0, 0.3, 0.2)),
                               CoalescenceProbability::constant(1.0),
                               DaughterModel::power_law(0.0));
    State s;
    s.g = Vec::Ones(2);
    const auto [loss, gain] = ws.number_balance(s);
    // only the (0,0) pair fits below the last pivot
    const Real g0 = s.g[0] * grid.width(0);
    CHECK(loss == doctest::Approx(-0.5 * g0 * g0).epsilon(1e-14));
    CHECK(gain == 0.0);
}

TEST_CASE("breakage number gain vanishes for exact binary counts") {
    const Grid grid = build_grid(40.0, 3);
    const OperatorWorkspace ws =
        default_ws(grid, 0.0, 0.0, TensorNormalization::CountExact);
    std::mt19937_64 rng(17);
    const State s = oracles::random_state(grid, rng);
    const auto [loss, gain] = ws.number_balance(s);
    CHECK(loss == 0.0); // E = 0: no coalescence
    CHECK(gain == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("apply is bit-deterministic across assemblies and thread counts") {
    const Grid grid = build_grid(80.0, 5);
    OperatorWorkspace a = default_ws(grid, 0.5, -0.5);
    OperatorWorkspace b = default_ws(grid, 0.5, -0.5);
    std::mt19937_64 rng(31);
    const State s = oracles::random_state(grid, rng);
    a.set_threads(1);
    const Vec one = a.apply(s);
    a.set_threads(8);
    const Vec eight = a.apply(s);
    b.set_threads(3);
    const Vec three = b.apply(s);
    for (Index l = 0; l < grid.size(); ++l) {
        CHECK(one[l] == eight[l]);
        CHECK(one[l] == three[l]);
    }
}
