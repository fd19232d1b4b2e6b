#ifndef HOMSIM_COHERENT_HPP
#define HOMSIM_COHERENT_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "homsim/fock.hpp"
#include "homsim/polarization.hpp"
#include "homsim/rng.hpp"

namespace homsim {

// Raised when a visibility cannot be estimated from the accumulated counts
// (no reference coincidences: mu * eta too small for the pair budget).
struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ChannelKind { IdealDepolarizing, TimeEntanglement, RandomRotation };

ChannelKind kind_of(const ChannelModel& channel);

// Phase-randomized weak pulse: Poisson mean photon number, Jones vector in
// the channel eigenbasis, optical phase.
struct CoherentPulse {
    double mu;
    PolarizationState jones;
    double phase = 0.0;
};

struct FieldIntensities {
    double i_c;
    double i_d;
};

// Classical field map of the 50/50 splitter applied to the two pulse
// amplitudes, componentwise in polarization: C = (-iA + B)/sqrt(2),
// D = (A - iB)/sqrt(2). Returns the output intensities.
FieldIntensities splitter_intensities(const CoherentPulse& a, const CoherentPulse& b);

// Same intensities computed from the invariants they actually depend on:
// the two pulse energies, the magnitude of the polarization overlap and the
// (shifted) relative optical phase. Used in the Monte Carlo hot loop;
// equality with splitter_intensities is covered by tests.
inline FieldIntensities splitter_intensities_reduced(double mu_a, double mu_b,
                                                     double overlap_mag, double rel_phase) {
    const double mean = 0.5 * (mu_a + mu_b);
    const double beat = std::sqrt(mu_a * mu_b) * overlap_mag * std::sin(rel_phase);
    return {mean + beat, mean - beat};
}

// Click probability of a threshold detector seeing intensity i through
// efficiency eta, with an independent dark click folded in.
inline double click_probability(double intensity, double eta, double dark_prob) {
    const double p = 1.0 - std::exp(-eta * intensity);
    return p + dark_prob - p * dark_prob;
}

// Probability that both detectors click in one gate, averaged over the
// relative optical phase with an n-node Gauss-Legendre rule.
double coherent_pair_click_probability(const CoherentPulse& a, const CoherentPulse& b,
                                       const DetectorParams& det, int phase_nodes = 64);

// Model visibility 1 - P(overlap)/P(orthogonal) for a pulse pair whose
// polarization overlap squared is overlap_sq, both pulses at mean photon
// number mu. mu == 0 with no dark counts returns the analytic low-mu limit
// overlap_sq / 2.
double model_visibility(double mu, double overlap_sq, const DetectorParams& det,
                        int phase_nodes = 64);

struct VisibilityEstimate {
    double v = 0.0;
    double sigma = 0.0;
    std::uint64_t n_pairs = 0;
    std::uint64_t coincidences_channel = 0;
    std::uint64_t coincidences_reference = 0;

    // Computes v = 1 - C_channel/C_reference and the binomially propagated
    // 1-sigma uncertainty. Throws EstimationError when C_reference == 0.
    static VisibilityEstimate from_counts(std::uint64_t c_channel, std::uint64_t c_reference,
                                          std::uint64_t n_pairs);
};

// Monte Carlo visibility measurement: per pulse pair, realizes the channel
// (rotation signs per the pairing policy; identical pulses for the
// depolarizing kinds), draws the relative optical phase, and samples clicks.
// A fully distinguishable reference pair at the same mu and detector settings
// is accumulated in the same pass. Sharded like the Fock simulator; results
// do not depend on the thread count.
VisibilityEstimate run_visibility_experiment(const ChannelModel& channel, double mu,
                                             std::uint64_t n_pairs, const DetectorParams& det,
                                             StreamKey key, int threads = 1,
                                             double input_delta = 0.0);

struct VisibilityCell {
    double mu;
    double alpha0;
    std::optional<VisibilityEstimate> est;  // empty when estimation failed
};

// Full (mu, alpha0) cross-product sweep. Cells are keyed by their index, so
// the table is deterministic for a fixed seed. Estimation failures are
// flagged cells, not errors.
std::vector<VisibilityCell> visibility_surface(const std::vector<double>& mu_grid,
                                               const std::vector<double>& alpha0_grid,
                                               ChannelKind kind, PairingPolicy pairing,
                                               const DetectorParams& det, std::uint64_t n_pairs,
                                               StreamKey key, int threads = 1,
                                               double input_delta = 0.0);

// Asymptotic low-mu visibility: 1/2 for the depolarizing kinds, cos^2(a0)/2
// for the rotation channel under alternating pairing.
double analytic_visibility_low_mu(ChannelKind kind, double alpha0);

}  // namespace homsim

#endif
