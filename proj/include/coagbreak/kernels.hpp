// Collision kernels, coalescence probability, daughter distributions, and
// the numeric certification of the growth hypotheses they are required to
// satisfy.
#ifndef COAGBREAK_KERNELS_HPP
#define COAGBREAK_KERNELS_HPP

#include <optional>
#include <string>
#include <vector>

#include "coagbreak/types.hpp"

namespace coagbreak {

// Growth-bound parameters: Psi(mu,nu) <= k_bound (1+mu)^omega (1+nu)^omega
// / (mu+nu)^sigma with 0 <= omega - sigma < 1, sigma in (0, 1/2),
// 0 <= omega < 1. sigma also sets the weights of the solution-space norm.
struct GrowthBound {
    Real k_bound = 1.0;
    Real omega = 0.0;
    Real sigma = 0.25;
};

enum class KernelVariant { Constant, KineticTheory, SingularBoundFamily, UniquenessClass };

// Symmetric nonnegative collision rate Psi(mu,nu) together with its declared
// growth bound. Construction validates the exponent window; evaluation of a
// nonpositive volume is a domain error.
class KernelModel {
  public:
    KernelModel(KernelVariant variant, Real k, GrowthBound bound);

    Real operator()(Real mu, Real nu) const;

    KernelVariant variant() const { return variant_; }
    Real rate_constant() const { return k_; }
    const GrowthBound& bound() const { return bound_; }

    static KernelModel constant(Real k, GrowthBound bound);
    static KernelModel kinetic_theory(Real k, GrowthBound bound);
    // The bound family itself as a kernel: k (1+mu)^w (1+nu)^w / (mu+nu)^s.
    static KernelModel singular_bound_family(Real k, GrowthBound bound);
    // The restricted uniqueness class: k / (mu+nu)^sigma.
    static KernelModel uniqueness_class(Real k, GrowthBound bound);

  private:
    KernelVariant variant_;
    Real k_;
    GrowthBound bound_;
};

Real eval_kernel(const KernelModel& model, Real mu, Real nu);

enum class ProbabilityVariant { ConstantE, VolumeDependent };

// Probability that a collision results in coalescence; the complement is the
// breakage probability. Symmetric, valued in [0, 1].
class CoalescenceProbability {
  public:
    static CoalescenceProbability constant(Real value);
    // exp(-(mu+nu)/scale): small pairs coalesce, large pairs shatter.
    static CoalescenceProbability volume_dependent(Real scale);

    Real operator()(Real mu, Real nu) const;
    Real breakup(Real mu, Real nu) const { return 1.0 - (*this)(mu, nu); }

    ProbabilityVariant variant() const { return variant_; }
    Real parameter() const { return param_; }
    bool is_always_one() const {
        return variant_ == ProbabilityVariant::ConstantE && param_ == 1.0;
    }
    bool is_always_zero() const {
        return variant_ == ProbabilityVariant::ConstantE && param_ == 0.0;
    }

  private:
    CoalescenceProbability(ProbabilityVariant v, Real p) : variant_(v), param_(p) {}
    ProbabilityVariant variant_;
    Real param_;
};

// Power-law fragment distribution P(mu | nu; tau) = (theta+2) mu^theta /
// (nu+tau)^(theta+1) on 0 < mu <= nu+tau, or the elastic pass-through where
// both parents survive a breakup unchanged. theta in (-1, 0]; theta <= -1
// would give an infeasible fragment count and is rejected.
class DaughterModel {
  public:
    static DaughterModel power_law(Real theta);
    static DaughterModel elastic();

    bool is_elastic() const { return elastic_; }
    Real theta() const;

    // Expected number of fragments per breakup, (theta+2)/(theta+1).
    Real fragment_count() const;

    // eta(r) = (theta+2)/(theta-r+1), the constant in the weighted-moment
    // bound on P; diverges as r -> theta+1.
    Real eta(Real r) const;
    bool eta_defined(Real r) const;

    // Natural singularity exponent of the family, tau2 = -theta.
    Real tau2() const;
    // k'(lambda) = (theta+2)/lambda^(1+theta), the small-fragment envelope.
    Real k_prime(Real lambda) const;

  private:
    DaughterModel(bool elastic, Real theta) : elastic_(elastic), theta_(theta) {}
    bool elastic_ = false;
    Real theta_ = 0.0;
};

Real eval_daughter(const DaughterModel& model, Real mu, Real nu, Real tau);

// Exact antiderivative: integral_0^x mu^q P(mu | nu; tau) dmu
//   = (theta+2) x^(theta+q+1) / ((theta+q+1) (nu+tau)^(theta+1)),
// requiring q+theta+1 > 0 and x in (0, nu+tau].
Real daughter_partial_moment(const DaughterModel& model, Real q, Real x,
                             Real nu, Real tau);

Real fragment_count(const DaughterModel& model);
Real eta(const DaughterModel& model, Real r);

// Log-spaced evaluation lattice for the hypothesis checks.
struct SamplePlan {
    Real min_volume = 1e-6;
    Real max_volume = 1e6;
    int points_per_decade = 4;
    Real lambda = 1.0;      // split volume for the small-fragment envelope
    Real rel_slack = 1e-12; // tolerated relative violation

    std::vector<Real> volumes() const;
};

struct HypothesisRecord {
    std::string id;          // "2.1", "2.2", "2.3", "2.6", "2.7"
    std::string status;      // "pass" | "fail" | "not-applicable"
    std::string description;
    Real worst_ratio = 0.0;  // LHS/RHS at the worst sample
    std::vector<Real> worst_point;
    long samples = 0;
};

struct AssumptionReport {
    std::vector<HypothesisRecord> hypotheses;
    bool all_pass() const;
    const HypothesisRecord* find(const std::string& id) const;
};

// Evaluates hypotheses 2.1, 2.2, 2.3, 2.6 and 2.7 on the sample lattice.
// Failures are report entries with a witness point, never errors.
AssumptionReport check_assumptions(const KernelModel& kernel,
                                   const CoalescenceProbability& prob,
                                   const DaughterModel& daughter,
                                   const SamplePlan& plan = {});

} // namespace coagbreak

#endif
