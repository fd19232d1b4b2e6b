#ifndef HOMSIM_DISCRIMINATOR_HPP
#define HOMSIM_DISCRIMINATOR_HPP

#include <cstdint>
#include <variant>

#include "homsim/coherent.hpp"
#include "homsim/fock.hpp"

namespace homsim {

// A coincidence (or a visibility below the channel-independent maximum)
// identifies the random-rotation channel; everything else is one of three
// distinguishable flavors of "no conclusion". Angles are reported in
// [0, pi/2]: the observables are even in alpha0, so sign and branch are
// unidentifiable.
struct ConclusiveRandomRotation {
    double alpha0_estimate;
    double ci_low;
    double ci_high;
};
struct InconclusiveAtMaximum {};
struct InconclusiveInsufficientPrecision {
    double required_sigma;  // 1-sigma level at which the margin test could pass
};
struct InconclusiveNoEvidence {
    double alpha0_upper_bound;  // largest alpha0 consistent with zero counts
    double confidence;
};

using Verdict = std::variant<ConclusiveRandomRotation, InconclusiveAtMaximum,
                             InconclusiveInsufficientPrecision, InconclusiveNoEvidence>;

// Single-photon regime. Any coincidence is conclusive (requires dark-free
// gates: dark_prob must be 0); zero coincidences yield the largest alpha0
// consistent with the null outcome at the given confidence, from
// (1 - coincidence_rate(alpha0))^n_pairs = 1 - confidence.
Verdict single_photon_verdict(std::uint64_t coincidences, std::uint64_t n_pairs,
                              const DetectorParams& det, double confidence);

// Coherent regime: compares the measured visibility against the maximum
// expected visibility V_max(mu) with margin epsilon = k_sigma * est.sigma.
// v + eps < V_max is conclusive; v at or above V_max can never become
// conclusive; anything else needs more data.
Verdict coherent_verdict(const VisibilityEstimate& est, double mu, const DetectorParams& det,
                         double k_sigma);

// Inverts the monotone map alpha0 -> V(mu, alpha0) (alternating pairing) by
// bisection to 1e-10. mu == 0 uses the analytic limit arccos(sqrt(2 v)).
// Requires 0 <= v <= V_max(mu).
double estimate_alpha0(double v, double mu, const DetectorParams& det);

// Number of pulse pairs needed before k_sigma times the predicted visibility
// uncertainty drops below the discrimination margin V_max - V(mu, alpha0).
// Saturates at UINT64_MAX as the margin vanishes.
std::uint64_t required_pairs(double mu, double alpha0_resolvable, const DetectorParams& det,
                             double k_sigma);

}  // namespace homsim

#endif
