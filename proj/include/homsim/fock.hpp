#ifndef HOMSIM_FOCK_HPP
#define HOMSIM_FOCK_HPP

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "homsim/polarization.hpp"
#include "homsim/rng.hpp"

namespace homsim {

// Mode bookkeeping: spatial inputs A/B feed the splitter, C/D leave it, and
// each spatial mode carries the two polarization components of the channel
// eigenbasis (labelled H/V once the eigenbasis is aligned with the lab frame).
enum class Spatial : std::uint8_t { A = 0, B = 1, C = 2, D = 3 };
enum class Pol : std::uint8_t { H = 0, V = 1 };

constexpr int mode_index(Spatial s, Pol p) {
    return static_cast<int>(s) * 2 + static_cast<int>(p);
}

// Occupation numbers for the 8 polarization-spatial mode slots, in the order
// AH, AV, BH, BV, CH, CV, DH, DV. The engine caps occupations at 2.
using Occupation = std::array<std::uint8_t, 8>;

inline constexpr int kMaxOccupation = 2;
inline constexpr int kMaxTotalPhotons = 2;

// Superposition over Fock occupation vectors. Amplitudes refer to the
// normalized number states, i.e. the sqrt(n!) factors of repeated creation
// operators are already folded in.
class FockSuperposition {
  public:
    using TermMap = std::map<Occupation, cd>;

    void add(const Occupation& occ, cd amp);
    const TermMap& terms() const { return terms_; }

    double norm_sq() const;
    void normalize();  // rejects the zero state
    // Total photon number, identical across terms (throws otherwise).
    int total_photons() const;

    bool lives_on_inputs() const;   // all photons in A/B
    bool lives_on_outputs() const;  // all photons in C/D

    // One photon in the given spatial mode with the given polarization state.
    static FockSuperposition single_photon(Spatial s, const PolarizationState& psi);
    // Photon in A with state a and photon in B with state b.
    static FockSuperposition two_photon_input(const PolarizationState& a,
                                              const PolarizationState& b);

  private:
    TermMap terms_;
};

// 50/50 splitter: a_p -> (d_p - i c_p)/sqrt(2), b_p -> (c_p - i d_p)/sqrt(2),
// applied independently per polarization. Photon number is conserved and the
// norm is preserved. Rejects states that are not purely on the input modes or
// that carry more than two photons.
FockSuperposition beamsplitter_transform(const FockSuperposition& state);

// Probability that, after interference of one photon in A (state a) and one
// in B (state b), at least one photon exits in spatial C and at least one in
// spatial D. Equals (1 - |<a|b>|^2)/2.
double hom_coincidence_probability(const PolarizationState& a, const PolarizationState& b);

struct DetectorParams {
    double eta_os = 1.0;    // optical switch transmission, crossed once per photon
    double eta1 = 1.0;      // detector efficiency at output C
    double eta2 = 1.0;      // detector efficiency at output D
    double dark_prob = 0.0; // independent per-detector per-gate dark click

    void validate() const;
};

// Mean coincidence probability per pulse pair when consecutive photons carry
// different states with probability p_differ and are detected through the
// given losses: p_differ * eta_os^2 * eta1 * eta2 * P_hom(a, b).
double coincidence_with_losses(const PolarizationState& a, const PolarizationState& b,
                               const DetectorParams& det, double p_differ);

// Exact joint click distribution for one interfering pair, folding in switch
// loss, threshold detection and dark counts. Built once per distinct pair
// state and sampled per gate.
class PairClickModel {
  public:
    struct Branch {
        double prob;  // probability of this photon-routing outcome
        double p1;    // click probability at detector 1 given the routing
        double p2;    // click probability at detector 2
    };

    PairClickModel() = default;
    PairClickModel(const PolarizationState& a, const PolarizationState& b,
                   const DetectorParams& det);

    double coincidence_probability() const;
    double click1_probability() const;
    double click2_probability() const;
    std::pair<bool, bool> sample(RngStream& rng) const;
    const std::vector<Branch>& branches() const { return branches_; }

  private:
    std::vector<Branch> branches_;
};

struct FockCounts {
    std::uint64_t coincidences = 0;
    std::uint64_t singles1 = 0;
    std::uint64_t singles2 = 0;
    std::uint64_t n_pairs = 0;

    FockCounts& operator+=(const FockCounts& o) {
        coincidences += o.coincidences;
        singles1 += o.singles1;
        singles2 += o.singles2;
        n_pairs += o.n_pairs;
        return *this;
    }
    friend bool operator==(const FockCounts&, const FockCounts&) = default;
};

// Monte Carlo run of the single-photon interferometer: per pair, realize the
// channel (rotation signs per pairing policy; identical photons for the
// depolarizing kinds), then sample detector clicks from the exact pair click
// model. Sharded over fixed-size blocks with per-shard RNG streams, so the
// counts are independent of the thread count.
FockCounts simulate_fock_experiment(const ChannelModel& channel, std::uint64_t n_pairs,
                                    const DetectorParams& det, StreamKey key, int threads = 1,
                                    double input_delta = 0.0);

}  // namespace homsim

#endif
