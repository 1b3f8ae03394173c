#include <doctest.h>

#include <cmath>
#include <random>

#include "coagbreak/diagnostics.hpp"
#include "oracles.hpp"

using namespace coagbreak;

namespace {

// grid with an odd cell count so one pivot sits at exactly 1
Grid unit_pivot_grid() { return build_grid(std::pow(10.0, 1.5), 5); }

Index unit_cell(const Grid& g) {
    const auto c = g.locate(1.0);
    REQUIRE(c.has_value());
    REQUIRE(g.pivot(*c) == doctest::Approx(1.0).epsilon(1e-12));
    return *c;
}

} // namespace

TEST_CASE("moments of a monodisperse state are single-term sums") {
    const Grid grid = build_grid(100.0, 4);
    const auto cell = grid.locate(2.0);
    REQUIRE(cell.has_value());
    State s;
    s.g = Vec::Zero(grid.size());
    s.g[*cell] = 3.0 / grid.width(*cell); // g * width = 3
    const Real x = grid.pivot(*cell);
    CHECK(moment(s, grid, 0.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(moment(s, grid, 1.0) == doctest::Approx(3.0 * x).epsilon(1e-14));
    CHECK(moment(s, grid, 2.0) == doctest::Approx(3.0 * x * x).epsilon(1e-14));
}

TEST_CASE("moments of the exponential approach the gamma integrals") {
    const Grid grid = build_grid(1000.0, 16);
    const State s = truncate_initial([](Real mu) { return std::exp(-mu); }, grid);
    // against integrals over the truncated domain, by independent quadrature
    for (Real q : {0.0, 1.0, -0.4}) {
        const Real truncated = oracles::adaptive_simpson(
            [q](Real mu) { return std::pow(mu, q) * std::exp(-mu); },
            grid.left(0), grid.right(grid.size() - 1), 1e-12);
        CHECK(moment(s, grid, q) == doctest::Approx(truncated).epsilon(2e-3));
    }
    // and against the full-line values, within the truncation tail
    CHECK(moment(s, grid, 0.0) == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(moment(s, grid, 1.0) == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(s_norm(s, grid, 0.2) ==
          doctest::Approx(1.0 + 1.0 + std::tgamma(0.6)).epsilon(2e-2));
}

TEST_CASE("solution-space norm of simple states") {
    const Grid grid = unit_pivot_grid();
    State zero;
    zero.g = Vec::Zero(grid.size());
    CHECK(s_norm(zero, grid, 0.2) == 0.0);

    const Index c = unit_cell(grid);
    State mono;
    mono.g = Vec::Zero(grid.size());
    mono.g[c] = 2.5;
    const Real number = 2.5 * grid.width(c);
    CHECK(s_norm(mono, grid, 0.2) == doctest::Approx(3.0 * number).epsilon(1e-12));
}

TEST_CASE("moment record carries the standard exponents") {
    const Grid grid = build_grid(10.0, 3);
    const State s = truncate_initial([](Real mu) { return std::exp(-mu); }, grid);
    const MomentRecord rec = moment_record(s, grid, 0.2, {2.0});
    CHECK(rec.values.count(-0.4));
    CHECK(rec.values.count(-0.2));
    CHECK(rec.values.count(0.0));
    CHECK(rec.values.count(1.0));
    CHECK(rec.values.count(2.0));
    for (const auto& [q, v] : rec.values) CHECK(v >= 0.0);
}

TEST_CASE("certificate constants match the closed formulas") {
    const BoundCertificate cert = bound_certificate(1.0, 1.0, 0.0, 0.2, 2.0, 0.0);
    CHECK(cert.a == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(cert.b == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cert.p1 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cert.p == doctest::Approx(5.0).epsilon(1e-15));

    // homogeneity in the initial norm
    const BoundCertificate twice = bound_certificate(2.0, 1.0, 0.0, 0.2, 2.0, 0.0);
    CHECK(twice.a == doctest::Approx(2.0 * cert.a).epsilon(1e-15));
    CHECK(twice.b == doctest::Approx(4.0 * cert.b).epsilon(1e-15));

    // horizon zero collapses p1 to the initial norm
    const BoundCertificate t0 = bound_certificate(3.7, 2.0, 0.3, 0.2, 5.0, 0.0);
    CHECK(t0.p1 == doctest::Approx(3.7).epsilon(1e-15));
    CHECK(t0.p >= t0.g_in_norm);
}

TEST_CASE("trajectory bound check passes and fails where it should") {
    const Grid grid = build_grid(50.0, 5);
    const State s0 = truncate_initial([](Real mu) { return std::exp(-mu); }, grid);
    Trajectory traj;
    traj.states = {s0};

    const Real norm0 = s_norm(s0, grid, 0.2);
    const BoundCertificate cert = bound_certificate(norm0, 1.0, 0.5, 0.2, 15.0, 1.0);
    BoundCheck check = check_bound(traj, grid, 0.2, cert);
    CHECK(check.pass);
    CHECK(check.min_margin > 0.0);

    // inflate the state beyond the certificate
    Trajectory bad = traj;
    State inflated = s0;
    inflated.g *= (cert.p / norm0) * 2.0;
    inflated.t = 0.5;
    bad.states.push_back(inflated);
    check = check_bound(bad, grid, 0.2, cert);
    CHECK_FALSE(check.pass);
    CHECK(check.first_violation == 1);
    CHECK(check.margins.size() == 2);
}

TEST_CASE("tail mass decreases in lambda and respects the majorant") {
    const Grid grid = build_grid(100.0, 6);
    const State s = truncate_initial([](Real mu) { return std::exp(-mu); }, grid);
    const Real m1 = moment(s, grid, 1.0);

    const TailMass at_one = tail_mass(s, grid, 1.0, 0.2, m1);
    CHECK(at_one.value <= at_one.majorant);
    CHECK(at_one.majorant == doctest::Approx(2.0 * m1).epsilon(1e-14));

    Real prev = std::numeric_limits<Real>::infinity();
    for (Real lambda : {0.5, 1.0, 2.0, 5.0, 20.0}) {
        const TailMass tm = tail_mass(s, grid, lambda, 0.2, m1);
        CHECK(tm.value <= prev);
        prev = tm.value;
    }
    const TailMass beyond = tail_mass(s, grid, 200.0, 0.2, m1);
    CHECK(beyond.value == 0.0);
}

TEST_CASE("weighted distance is a metric") {
    const Grid grid = build_grid(50.0, 4);
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const State a = oracles::random_state(grid, rng);
        const State b = oracles::random_state(grid, rng);
        const State c = oracles::random_state(grid, rng);
        const Real ab = weighted_distance(a, b, grid, 0.2);
        const Real ba = weighted_distance(b, a, grid, 0.2);
        const Real ac = weighted_distance(a, c, grid, 0.2);
        const Real cb = weighted_distance(c, b, grid, 0.2);
        CHECK(ab >= 0.0);
        CHECK(ab == ba);
        CHECK(ab <= ac + cb + 1e-12 * (ac + cb));
        CHECK(weighted_distance(a, a, grid, 0.2) == 0.0);
    }
}

TEST_CASE("single-cell difference at unit volume weighs twice the number") {
    const Grid grid = unit_pivot_grid();
    const Index c = unit_cell(grid);
    State a, b;
    a.g = Vec::Zero(grid.size());
    b.g = Vec::Zero(grid.size());
    b.g[c] = 0.7;
    const Real delta_number = 0.7 * grid.width(c);
    CHECK(weighted_distance(a, b, grid, 0.2) ==
          doctest::Approx(2.0 * delta_number).epsilon(1e-12));
}

TEST_CASE("contraction rate formula") {
    CHECK(contraction_rate(1.0, 1.0, 1.0, 2.0) == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(contraction_rate(1.0, 1.0, 0.0, 2.0) == 0.0);
    const Real base = contraction_rate(0.7, 1.3, 1.0, 5.0);
    CHECK(contraction_rate(0.7, 1.3, 3.0, 5.0) ==
          doctest::Approx(3.0 * base).epsilon(1e-14));
}
