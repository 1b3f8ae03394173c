#include "coagbreak/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coagbreak {

namespace {

void require_volume(Real v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::domain_error(std::string(what) + " must be a positive finite volume");
}

void validate_bound(const GrowthBound& b) {
    if (!(b.k_bound >= 0.0))
        throw std::invalid_argument("kernel bound constant k must be >= 0");
    if (!(b.sigma > 0.0 && b.sigma < 0.5))
        throw std::invalid_argument("sigma in (0, 1/2) required");
    if (!(b.omega >= 0.0 && b.omega < 1.0))
        throw std::invalid_argument("omega in [0, 1) required");
    const Real d = b.omega - b.sigma;
    if (!(d >= 0.0 && d < 1.0))
        throw std::invalid_argument("0 <= omega - sigma < 1 required");
}

} // namespace

KernelModel::KernelModel(KernelVariant variant, Real k, GrowthBound bound)
    : variant_(variant), k_(k), bound_(bound) {
    if (!(k >= 0.0) || !std::isfinite(k))
        throw std::invalid_argument("kernel rate constant k must be >= 0");
    validate_bound(bound_);
}

Real KernelModel::operator()(Real mu, Real nu) const {
    require_volume(mu, "mu");
    require_volume(nu, "nu");
    switch (variant_) {
    case KernelVariant::Constant:
        return k_;
    case KernelVariant::KineticTheory:
        return k_ * (std::cbrt(mu) + std::cbrt(nu)) * std::sqrt(mu * nu) *
               std::pow(mu + nu, -1.5);
    case KernelVariant::SingularBoundFamily:
        return k_ * std::pow(1.0 + mu, bound_.omega) * std::pow(1.0 + nu, bound_.omega) *
               std::pow(mu + nu, -bound_.sigma);
    case KernelVariant::UniquenessClass:
        return k_ * std::pow(mu + nu, -bound_.sigma);
    }
    return 0.0;
}

KernelModel KernelModel::constant(Real k, GrowthBound bound) {
    return {KernelVariant::Constant, k, bound};
}
KernelModel KernelModel::kinetic_theory(Real k, GrowthBound bound) {
    return {KernelVariant::KineticTheory, k, bound};
}
KernelModel KernelModel::singular_bound_family(Real k, GrowthBound bound) {
    return {KernelVariant::SingularBoundFamily, k, bound};
}
KernelModel KernelModel::uniqueness_class(Real k, GrowthBound bound) {
    return {KernelVariant::UniquenessClass, k, bound};
}

Real eval_kernel(const KernelModel& model, Real mu, Real nu) {
    return model(mu, nu);
}

CoalescenceProbability CoalescenceProbability::constant(Real value) {
    if (!(value >= 0.0 && value <= 1.0))
        throw std::invalid_argument("coalescence probability must lie in [0, 1]");
    return {ProbabilityVariant::ConstantE, value};
}

CoalescenceProbability CoalescenceProbability::volume_dependent(Real scale) {
    if (!(scale > 0.0))
        throw std::invalid_argument("volume_dependent probability needs scale > 0");
    return {ProbabilityVariant::VolumeDependent, scale};
}

Real CoalescenceProbability::operator()(Real mu, Real nu) const {
    require_volume(mu, "mu");
    require_volume(nu, "nu");
    if (variant_ == ProbabilityVariant::ConstantE) return param_;
    return std::exp(-(mu + nu) / param_);
}

DaughterModel DaughterModel::power_law(Real theta) {
    if (!(theta > -1.0 && theta <= 0.0))
        throw std::invalid_argument(
            "theta in (-1, 0] required (infeasible fragment count otherwise)");
    return {false, theta};
}

DaughterModel DaughterModel::elastic() { return {true, 0.0}; }

Real DaughterModel::theta() const {
    if (elastic_) throw std::logic_error("elastic daughter model has no theta");
    return theta_;
}

Real DaughterModel::fragment_count() const {
    if (elastic_) return 2.0;
    return (theta_ + 2.0) / (theta_ + 1.0);
}

bool DaughterModel::eta_defined(Real r) const {
    return !elastic_ && theta_ - r + 1.0 > 0.0;
}

Real DaughterModel::eta(Real r) const {
    if (elastic_)
        throw std::logic_error("elastic daughter model provides no eta(r)");
    const Real denom = theta_ - r + 1.0;
    if (!(denom > 0.0))
        throw std::domain_error("eta(r) diverges: theta - r + 1 <= 0");
    return (theta_ + 2.0) / denom;
}

Real DaughterModel::tau2() const {
    if (elastic_) return 0.0;
    return -theta_;
}

Real DaughterModel::k_prime(Real lambda) const {
    if (elastic_) throw std::logic_error("elastic daughter model has no k'(lambda)");
    if (!(lambda > 0.0)) throw std::domain_error("k'(lambda) needs lambda > 0");
    return (theta_ + 2.0) / std::pow(lambda, 1.0 + theta_);
}

Real eval_daughter(const DaughterModel& model, Real mu, Real nu, Real tau) {
    require_volume(mu, "mu");
    require_volume(nu, "nu");
    require_volume(tau, "tau");
    if (model.is_elastic())
        throw std::logic_error("elastic daughter model is not a density");
    const Real s = nu + tau;
    if (mu > s) return 0.0;
    const Real theta = model.theta();
    return (theta + 2.0) * std::pow(mu, theta) / std::pow(s, theta + 1.0);
}

Real daughter_partial_moment(const DaughterModel& model, Real q, Real x,
                             Real nu, Real tau) {
    require_volume(nu, "nu");
    require_volume(tau, "tau");
    if (model.is_elastic())
        throw std::logic_error("elastic daughter model has no partial moments");
    const Real s = nu + tau;
    if (!(x > 0.0 && x <= s))
        throw std::domain_error("partial moment requires x in (0, nu+tau]");
    const Real theta = model.theta();
    const Real p = theta + q + 1.0;
    if (!(p > 0.0))
        throw std::domain_error("divergent moment: q + theta + 1 <= 0");
    return (theta + 2.0) * std::pow(x, p) / (p * std::pow(s, theta + 1.0));
}

Real fragment_count(const DaughterModel& model) { return model.fragment_count(); }
Real eta(const DaughterModel& model, Real r) { return model.eta(r); }

std::vector<Real> SamplePlan::volumes() const {
    if (!(min_volume > 0.0 && max_volume > min_volume))
        throw std::invalid_argument("sample plan needs 0 < min_volume < max_volume");
    if (points_per_decade < 1)
        throw std::invalid_argument("sample plan needs points_per_decade >= 1");
    const Real lo = std::log10(min_volume);
    const Real hi = std::log10(max_volume);
    const int npts = static_cast<int>(std::ceil((hi - lo) * points_per_decade)) + 1;
    std::vector<Real> vols;
    vols.reserve(static_cast<std::size_t>(npts));
    for (int i = 0; i < npts; ++i) {
        const Real f = static_cast<Real>(i) / static_cast<Real>(npts - 1);
        vols.push_back(std::pow(10.0, lo + f * (hi - lo)));
    }
    return vols;
}

bool AssumptionReport::all_pass() const {
    return std::all_of(hypotheses.begin(), hypotheses.end(),
                       [](const HypothesisRecord& h) { return h.status != "fail"; });
}

const HypothesisRecord* AssumptionReport::find(const std::string& id) const {
    for (const auto& h : hypotheses)
        if (h.id == id) return &h;
    return nullptr;
}

namespace {

// LHS <= RHS scanned as sup LHS/RHS; pass iff sup <= 1 + slack.
struct UpperScan {
    Real worst = 0.0;
    std::vector<Real> point;
    long samples = 0;

    void take(Real lhs, Real rhs, std::initializer_list<Real> pt) {
        ++samples;
        if (rhs <= 0.0) {
            if (lhs > 0.0 && worst < std::numeric_limits<Real>::infinity()) {
                worst = std::numeric_limits<Real>::infinity();
                point = pt;
            }
            return;
        }
        const Real ratio = lhs / rhs;
        if (ratio > worst) {
            worst = ratio;
            point = pt;
        }
    }
    bool pass(Real slack) const { return worst <= 1.0 + slack; }
};

// LHS >= RHS scanned as inf LHS/RHS; pass iff inf >= 1 - slack. A zero RHS
// makes the floor vacuous at that point.
struct LowerScan {
    Real worst = std::numeric_limits<Real>::infinity();
    std::vector<Real> point;
    long samples = 0;

    void take(Real lhs, Real rhs, std::initializer_list<Real> pt) {
        ++samples;
        if (rhs <= 0.0) return;
        const Real ratio = lhs / rhs;
        if (ratio < worst) {
            worst = ratio;
            point = pt;
        }
    }
    bool pass(Real slack) const { return worst >= 1.0 - slack; }
};

Real growth_envelope(const GrowthBound& b, Real mu, Real nu) {
    return b.k_bound * std::pow(1.0 + mu, b.omega) * std::pow(1.0 + nu, b.omega) *
           std::pow(mu + nu, -b.sigma);
}

} // namespace

AssumptionReport check_assumptions(const KernelModel& kernel,
                                   const CoalescenceProbability& prob,
                                   const DaughterModel& daughter,
                                   const SamplePlan& plan) {
    const auto vols = plan.volumes();
    const GrowthBound& b = kernel.bound();
    const Real slack = plan.rel_slack;
    AssumptionReport report;

    {
        // 2.1: Psi(mu,nu) <= k (1+mu)^w (1+nu)^w / (mu+nu)^s on the lattice.
        UpperScan scan;
        for (Real mu : vols)
            for (Real nu : vols)
                scan.take(kernel(mu, nu), growth_envelope(b, mu, nu), {mu, nu});
        report.hypotheses.push_back({"2.1", scan.pass(slack) ? "pass" : "fail",
                                     "kernel growth bound", scan.worst, scan.point,
                                     scan.samples});
    }

    const Real r = 2.0 * b.sigma;
    {
        // 2.2: E(mu,nu) >= (eta(r)-2)/(eta(r)-1) on (0,1)^2, at r = 2*sigma.
        HypothesisRecord rec{"2.2", "not-applicable", "coalescence probability floor",
                             0.0, {}, 0};
        if (daughter.is_elastic()) {
            rec.description += " (elastic daughter: eta unavailable)";
        } else if (!daughter.eta_defined(r)) {
            rec.status = "fail";
            rec.description += " (eta(2*sigma) diverges: theta - 2*sigma + 1 <= 0)";
            rec.worst_point = {daughter.theta(), r};
        } else {
            const Real et = daughter.eta(r);
            const Real floor = (et - 2.0) / (et - 1.0);
            LowerScan scan;
            for (Real mu : vols) {
                if (mu >= 1.0) continue;
                for (Real nu : vols) {
                    if (nu >= 1.0) continue;
                    scan.take(prob(mu, nu), floor, {mu, nu});
                }
            }
            rec.status = scan.pass(slack) ? "pass" : "fail";
            rec.worst_ratio = scan.worst;
            rec.worst_point = scan.point;
            rec.samples = scan.samples;
        }
        report.hypotheses.push_back(std::move(rec));
    }

    {
        // 2.3: integral_0^nu mu^(-r) P(mu | nu-tau; tau) dmu <= eta(r) nu^(-r),
        // evaluated with the closed-form partial moment at r = 2*sigma.
        HypothesisRecord rec{"2.3", "not-applicable", "weighted fragment moment bound",
                             0.0, {}, 0};
        if (daughter.is_elastic()) {
            rec.description += " (elastic daughter: point-mass P)";
        } else if (!daughter.eta_defined(r)) {
            rec.status = "fail";
            rec.description += " (eta(2*sigma) diverges)";
            rec.worst_point = {daughter.theta(), r};
        } else {
            const Real et = daughter.eta(r);
            UpperScan scan;
            const Real fracs[] = {0.1, 0.25, 0.5, 0.75, 0.9};
            for (Real nu : vols)
                for (Real f : fracs) {
                    const Real tau = f * nu;
                    const Real lhs =
                        daughter_partial_moment(daughter, -r, nu, nu - tau, tau);
                    scan.take(lhs, et * std::pow(nu, -r), {nu, tau});
                }
            rec.status = scan.pass(slack) ? "pass" : "fail";
            rec.worst_ratio = scan.worst;
            rec.worst_point = scan.point;
            rec.samples = scan.samples;
        }
        report.hypotheses.push_back(std::move(rec));
    }

    {
        // 2.6: P(mu|nu;tau) <= k'(lambda) mu^(-tau2) for nu+tau > lambda,
        // mu < min(lambda, nu+tau).
        HypothesisRecord rec{"2.6", "not-applicable", "small-fragment envelope",
                             0.0, {}, 0};
        if (daughter.is_elastic()) {
            rec.description += " (elastic daughter: point-mass P)";
        } else {
            const Real lambda = plan.lambda;
            const Real t2 = daughter.tau2();
            const Real kp = daughter.k_prime(lambda);
            UpperScan scan;
            for (Real nu : vols)
                for (Real tau : vols) {
                    if (!(nu + tau > lambda)) continue;
                    for (Real mu : vols) {
                        if (!(mu < lambda && mu <= nu + tau)) continue;
                        scan.take(eval_daughter(daughter, mu, nu, tau),
                                  kp * std::pow(mu, -t2), {mu, nu, tau});
                    }
                }
            rec.status = scan.pass(slack) ? "pass" : "fail";
            rec.worst_ratio = scan.worst;
            rec.worst_point = scan.point;
            rec.samples = scan.samples;
        }
        report.hypotheses.push_back(std::move(rec));
    }

    {
        // 2.7: Psi(mu,nu) <= k / (mu+nu)^sigma, the uniqueness class.
        UpperScan scan;
        for (Real mu : vols)
            for (Real nu : vols)
                scan.take(kernel(mu, nu),
                          b.k_bound * std::pow(mu + nu, -b.sigma), {mu, nu});
        report.hypotheses.push_back({"2.7", scan.pass(slack) ? "pass" : "fail",
                                     "uniqueness-class kernel bound", scan.worst,
                                     scan.point, scan.samples});
    }

    return report;
}

} // namespace coagbreak
