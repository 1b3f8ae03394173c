#include <doctest.h>

#include <cmath>
#include <random>

#include "coagbreak/kernels.hpp"
#include "oracles.hpp"

using namespace coagbreak;

namespace {
GrowthBound bound(Real k, Real omega, Real sigma) { return {k, omega, sigma}; }
} // namespace

TEST_CASE("kinetic-theory kernel matches the closed form") {
    const auto psi = KernelModel::kinetic_theory(1.0, bound(1.0, 0.5, 0.2));
    CHECK(psi(1.0, 1.0) == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-14));
    CHECK(eval_kernel(psi, 2.0, 3.0) ==
          doctest::Approx((std::cbrt(2.0) + std::cbrt(3.0)) * std::sqrt(6.0) *
                          std::pow(5.0, -1.5))
              .epsilon(1e-14));
}

TEST_CASE("constant kernel ignores volumes") {
    const auto psi = KernelModel::constant(1.0, bound(1.0, 0.3, 0.2));
    CHECK(psi(0.3, 7.2) == 1.0);
}

TEST_CASE("kernel evaluation is symmetric bit-exactly") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<Real> logv(-6.0, 6.0);
    const std::vector<KernelModel> models = {
        KernelModel::constant(2.0, bound(2.0, 0.3, 0.2)),
        KernelModel::kinetic_theory(1.0, bound(1.0, 0.5, 0.2)),
        KernelModel::singular_bound_family(1.5, bound(1.5, 0.4, 0.3)),
        KernelModel::uniqueness_class(1.0, bound(1.0, 0.2, 0.2)),
    };
    for (const auto& psi : models)
        for (int trial = 0; trial < 10000; ++trial) {
            const Real mu = std::pow(10.0, logv(rng));
            const Real nu = std::pow(10.0, logv(rng));
            CHECK(psi(mu, nu) == psi(nu, mu));
            CHECK(psi(mu, nu) >= 0.0);
            CHECK(std::isfinite(psi(mu, nu)));
        }
}

TEST_CASE("kernel construction rejects bad exponents") {
    CHECK_THROWS(KernelModel::constant(1.0, bound(1.0, 0.3, 0.6)));  // sigma
    CHECK_THROWS(KernelModel::constant(1.0, bound(1.0, 1.0, 0.2)));  // omega
    CHECK_THROWS(KernelModel::constant(1.0, bound(1.0, 0.1, 0.2)));  // omega < sigma
    CHECK_THROWS(KernelModel::constant(-1.0, bound(1.0, 0.3, 0.2)));
    const auto psi = KernelModel::constant(1.0, bound(1.0, 0.3, 0.2));
    CHECK_THROWS(psi(0.0, 1.0));
    CHECK_THROWS(psi(1.0, -2.0));
}

TEST_CASE("coalescence probability stays within [0,1] and symmetric") {
    const auto flat = CoalescenceProbability::constant(0.5);
    CHECK(flat(0.1, 3.0) == 0.5);
    CHECK(flat.breakup(0.1, 3.0) == 0.5);
    const auto vd = CoalescenceProbability::volume_dependent(2.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<Real> logv(-4.0, 4.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const Real mu = std::pow(10.0, logv(rng));
        const Real nu = std::pow(10.0, logv(rng));
        const Real e = vd(mu, nu);
        CHECK(e >= 0.0);
        CHECK(e <= 1.0);
        CHECK(e == vd(nu, mu));
        CHECK(vd.breakup(mu, nu) == doctest::Approx(1.0 - e).epsilon(1e-15));
    }
    CHECK_THROWS(CoalescenceProbability::constant(1.5));
    CHECK_THROWS(CoalescenceProbability::constant(-0.1));
}

TEST_CASE("daughter density follows the power law with hard support cutoff") {
    const auto binary = DaughterModel::power_law(0.0);
    CHECK(eval_daughter(binary, 0.5, 0.6, 0.4) == doctest::Approx(2.0).epsilon(1e-15));
    const auto half = DaughterModel::power_law(-0.5);
    CHECK(eval_daughter(half, 0.25, 0.5, 0.5) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(eval_daughter(binary, 3.0, 1.0, 1.0) == 0.0);
    CHECK_THROWS(eval_daughter(binary, -1.0, 1.0, 1.0));
    CHECK_THROWS(DaughterModel::power_law(-1.5));
    CHECK_THROWS(DaughterModel::power_law(-1.0));
    CHECK_THROWS(DaughterModel::power_law(0.5));
}

TEST_CASE("partial moments reproduce the mass and number identities") {
    const auto binary = DaughterModel::power_law(0.0);
    CHECK(daughter_partial_moment(binary, 1.0, 1.0, 0.6, 0.4) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(daughter_partial_moment(binary, 0.0, 1.0, 0.6, 0.4) ==
          doctest::Approx(2.0).epsilon(1e-15));
    CHECK(daughter_partial_moment(binary, 0.0, 0.5, 0.6, 0.4) ==
          doctest::Approx(1.0).epsilon(1e-15));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<Real> logv(-3.0, 3.0);
    std::uniform_real_distribution<Real> th(-0.95, 0.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const Real nu = std::pow(10.0, logv(rng));
        const Real tau = std::pow(10.0, logv(rng));
        const Real theta = th(rng);
        const auto model = DaughterModel::power_law(theta);
        const Real s = nu + tau;
        const Real mass = daughter_partial_moment(model, 1.0, s, nu, tau);
        CHECK(mass == doctest::Approx(s).epsilon(1e-13));
        const Real count = daughter_partial_moment(model, 0.0, s, nu, tau);
        CHECK(count == doctest::Approx(model.fragment_count()).epsilon(1e-13));
    }

    CHECK_THROWS(daughter_partial_moment(binary, -1.5, 1.0, 0.6, 0.4));
    CHECK_THROWS(daughter_partial_moment(binary, 0.0, 2.0, 0.6, 0.4)); // x > s
}

TEST_CASE("closed-form partial moments agree with independent quadrature") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<Real> logv(-2.0, 2.0);
    std::uniform_real_distribution<Real> th(-0.9, 0.0);
    std::uniform_real_distribution<Real> frac(0.05, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Real nu = std::pow(10.0, logv(rng));
        const Real tau = std::pow(10.0, logv(rng));
        const Real theta = th(rng);
        const Real q = trial % 2 == 0 ? 0.0 : 1.0;
        const Real x = frac(rng) * (nu + tau);
        const auto model = DaughterModel::power_law(theta);
        const Real closed = daughter_partial_moment(model, q, x, nu, tau);
        const Real quad =
            oracles::daughter_partial_moment_quadrature(theta, q, x, nu, tau);
        CHECK(closed == doctest::Approx(quad).epsilon(1e-8));
    }
}

TEST_CASE("fragment counts for the power-law family") {
    CHECK(fragment_count(DaughterModel::power_law(0.0)) == 2.0);
    CHECK(fragment_count(DaughterModel::power_law(-0.5)) ==
          doctest::Approx(3.0).epsilon(1e-14));
    CHECK(fragment_count(DaughterModel::power_law(-0.9)) ==
          doctest::Approx(11.0).epsilon(1e-12));
    CHECK(DaughterModel::elastic().fragment_count() == 2.0);
}

TEST_CASE("eta dominates the fragment count and diverges where it must") {
    const auto binary = DaughterModel::power_law(0.0);
    CHECK(eta(binary, 0.0) == 2.0);
    CHECK(eta(binary, 0.5) == doctest::Approx(4.0).epsilon(1e-14));
    const auto half = DaughterModel::power_law(-0.5);
    CHECK(eta(half, 0.4) == doctest::Approx(15.0).epsilon(1e-12));
    CHECK_THROWS(eta(half, 0.5));
    CHECK_THROWS(eta(half, 0.7));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<Real> th(-0.9, 0.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Real theta = th(rng);
        const auto model = DaughterModel::power_law(theta);
        std::uniform_real_distribution<Real> rr(0.0, theta + 1.0 - 1e-6);
        const Real r = rr(rng);
        CHECK(model.eta(r) >= model.fragment_count() - 1e-12);
    }
}

TEST_CASE("probability floor lies in [0,1) whenever eta >= 2") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<Real> th(-0.9, 0.0);
    std::uniform_real_distribution<Real> sg(0.01, 0.49);
    for (int trial = 0; trial < 500; ++trial) {
        const Real theta = th(rng);
        const Real sigma = sg(rng);
        const auto model = DaughterModel::power_law(theta);
        if (!model.eta_defined(2.0 * sigma)) continue;
        const Real et = model.eta(2.0 * sigma);
        REQUIRE(et >= 2.0);
        const Real floor = (et - 2.0) / (et - 1.0);
        CHECK(floor >= 0.0);
        CHECK(floor < 1.0);
    }
}

TEST_CASE("assumption report covers every hypothesis exactly once") {
    const auto psi = KernelModel::kinetic_theory(1.0, bound(1.0, 0.5, 0.2));
    const auto report = check_assumptions(psi, CoalescenceProbability::constant(1.0),
                                          DaughterModel::power_law(0.0));
    REQUIRE(report.hypotheses.size() == 5);
    for (const char* id : {"2.1", "2.2", "2.3", "2.6", "2.7"}) {
        int seen = 0;
        for (const auto& h : report.hypotheses)
            if (h.id == id) ++seen;
        CHECK(seen == 1);
    }
}

TEST_CASE("kinetic-theory kernel satisfies the growth bound") {
    // against the configured envelope used by the default scenario
    const auto own = KernelModel::kinetic_theory(1.0, bound(1.0, 0.5, 0.2));
    auto report = check_assumptions(own, CoalescenceProbability::constant(1.0),
                                    DaughterModel::power_law(0.0));
    const auto* h21 = report.find("2.1");
    REQUIRE(h21 != nullptr);
    CHECK(h21->status == "pass");
    CHECK(h21->worst_ratio < 1.0);

    // and against the wider envelope (k=2, omega=5/6, sigma=0.4)
    const auto wide = KernelModel::kinetic_theory(1.0, bound(2.0, 5.0 / 6.0, 0.4));
    report = check_assumptions(wide, CoalescenceProbability::constant(1.0),
                               DaughterModel::power_law(0.0));
    CHECK(report.find("2.1")->status == "pass");
}

TEST_CASE("full coalescence passes the probability floor") {
    const auto psi = KernelModel::constant(1.0, bound(1.0, 0.3, 0.2));
    const auto report = check_assumptions(psi, CoalescenceProbability::constant(1.0),
                                          DaughterModel::power_law(0.0));
    const auto* h22 = report.find("2.2");
    REQUIRE(h22 != nullptr);
    CHECK(h22->status == "pass");
}

TEST_CASE("power-law fragment moment bound is an exact equality") {
    const auto psi = KernelModel::kinetic_theory(1.0, bound(1.0, 0.5, 0.2));
    const auto report = check_assumptions(psi, CoalescenceProbability::constant(0.5),
                                          DaughterModel::power_law(-0.5));
    const auto* h23 = report.find("2.3");
    REQUIRE(h23 != nullptr);
    CHECK(h23->status == "pass");
    CHECK(h23->worst_ratio == doctest::Approx(1.0).epsilon(1e-12));
    const auto* h26 = report.find("2.6");
    REQUIRE(h26 != nullptr);
    CHECK(h26->status == "pass");
}

TEST_CASE("uniqueness-class membership is certified and refuted correctly") {
    const auto member = KernelModel::uniqueness_class(1.0, bound(1.0, 0.2, 0.2));
    auto report = check_assumptions(member, CoalescenceProbability::constant(0.5),
                                    DaughterModel::power_law(-0.5));
    CHECK(report.find("2.7")->status == "pass");

    const auto outsider = KernelModel::singular_bound_family(1.0, bound(1.0, 0.9, 0.2));
    report = check_assumptions(outsider, CoalescenceProbability::constant(1.0),
                               DaughterModel::power_law(0.0));
    const auto* h27 = report.find("2.7");
    REQUIRE(h27 != nullptr);
    CHECK(h27->status == "fail");
    CHECK(h27->worst_ratio > 1.0);
    CHECK(h27->worst_point.size() == 2);
    CHECK_FALSE(report.all_pass());
}

TEST_CASE("elastic daughter marks distribution hypotheses not-applicable") {
    const auto psi = KernelModel::constant(1.0, bound(1.0, 0.3, 0.2));
    const auto report = check_assumptions(psi, CoalescenceProbability::constant(0.5),
                                          DaughterModel::elastic());
    CHECK(report.find("2.3")->status == "not-applicable");
    CHECK(report.find("2.6")->status == "not-applicable");
    CHECK(report.find("2.2")->status == "not-applicable");
}
