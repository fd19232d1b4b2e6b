#include "homsim/coherent.hpp"

#include <algorithm>
#include <cmath>

#include "homsim/exec.hpp"

namespace homsim {

namespace {

struct QuadNode {
    double x;  // in [0, 2pi)
    double w;  // weights sum to 1
};

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on the recurrence,
// mapped to [0, 2pi) with normalized weights.
std::vector<QuadNode> phase_nodes_for(int n) {
    std::vector<QuadNode> nodes(n);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        nodes[i] = {pi * (1.0 - x), 0.5 * w};          // map [-1,1] -> [0,2pi], /2 normalizes
        nodes[n - 1 - i] = {pi * (1.0 + x), 0.5 * w};
    }
    return nodes;
}

const std::vector<QuadNode>& cached_phase_nodes(int n) {
    thread_local std::vector<QuadNode> cache;
    thread_local int cached_n = -1;
    if (cached_n != n) {
        cache = phase_nodes_for(n);
        cached_n = n;
    }
    return cache;
}

double pair_click_probability_reduced(double mu_a, double mu_b, double overlap_mag,
                                      const DetectorParams& det, int phase_nodes) {
    double p = 0.0;
    for (const auto& node : cached_phase_nodes(phase_nodes)) {
        const auto [i_c, i_d] = splitter_intensities_reduced(mu_a, mu_b, overlap_mag, node.x);
        p += node.w * click_probability(i_c, det.eta_os * det.eta1, det.dark_prob) *
             click_probability(i_d, det.eta_os * det.eta2, det.dark_prob);
    }
    return p;
}

}  // namespace

ChannelKind kind_of(const ChannelModel& channel) {
    if (std::holds_alternative<IdealDepolarizing>(channel)) return ChannelKind::IdealDepolarizing;
    if (std::holds_alternative<TimeEntanglement>(channel)) return ChannelKind::TimeEntanglement;
    return ChannelKind::RandomRotation;
}

FieldIntensities splitter_intensities(const CoherentPulse& a, const CoherentPulse& b) {
    if (!(a.mu >= 0.0 && b.mu >= 0.0))
        throw std::invalid_argument("splitter_intensities: mu must be >= 0");
    const double r = 1.0 / std::sqrt(2.0);
    const cd mi(0.0, -1.0);
    const cd amp_a = std::sqrt(a.mu) * std::polar(1.0, a.phase);
    const cd amp_b = std::sqrt(b.mu) * std::polar(1.0, b.phase);
    const cd av[2] = {amp_a * a.jones.amp_par(), amp_a * a.jones.amp_perp()};
    const cd bv[2] = {amp_b * b.jones.amp_par(), amp_b * b.jones.amp_perp()};
    double i_c = 0.0, i_d = 0.0;
    for (int p = 0; p < 2; ++p) {
        i_c += std::norm(r * (mi * av[p] + bv[p]));
        i_d += std::norm(r * (av[p] + mi * bv[p]));
    }
    return {i_c, i_d};
}

double coherent_pair_click_probability(const CoherentPulse& a, const CoherentPulse& b,
                                       const DetectorParams& det, int phase_nodes) {
    det.validate();
    if (!(a.mu >= 0.0 && b.mu >= 0.0))
        throw std::invalid_argument("coherent_pair_click_probability: mu must be >= 0");
    if (phase_nodes < 1)
        throw std::invalid_argument("coherent_pair_click_probability: phase_nodes < 1");
    const double overlap_mag = std::abs(state_overlap(a.jones, b.jones));
    return pair_click_probability_reduced(a.mu, b.mu, overlap_mag, det, phase_nodes);
}

double model_visibility(double mu, double overlap_sq, const DetectorParams& det,
                        int phase_nodes) {
    det.validate();
    if (!(mu >= 0.0)) throw std::invalid_argument("model_visibility: mu must be >= 0");
    if (!(overlap_sq >= 0.0 && overlap_sq <= 1.0 + 1e-12))
        throw std::invalid_argument("model_visibility: overlap_sq outside [0, 1]");
    if (mu == 0.0 && det.dark_prob == 0.0) return 0.5 * overlap_sq;
    const double o = std::sqrt(std::min(overlap_sq, 1.0));
    const double p_channel = pair_click_probability_reduced(mu, mu, o, det, phase_nodes);
    const double p_reference = pair_click_probability_reduced(mu, mu, 0.0, det, phase_nodes);
    if (p_reference <= 0.0)
        throw EstimationError("model_visibility: reference click probability is zero");
    return 1.0 - p_channel / p_reference;
}

VisibilityEstimate VisibilityEstimate::from_counts(std::uint64_t c_channel,
                                                   std::uint64_t c_reference,
                                                   std::uint64_t n_pairs) {
    if (c_reference == 0)
        throw EstimationError("no reference coincidences: mu or efficiency too small for n_pairs");
    VisibilityEstimate est;
    est.n_pairs = n_pairs;
    est.coincidences_channel = c_channel;
    est.coincidences_reference = c_reference;
    const double x = static_cast<double>(c_channel);
    const double y = static_cast<double>(c_reference);
    const double n = static_cast<double>(n_pairs);
    est.v = 1.0 - x / y;
    // Delta method on 1 - X/Y with independent binomial counters; the
    // one-count floor keeps sigma positive at zero observed coincidences.
    const double var_x = std::max(x, 1.0) * (1.0 - x / n);
    const double var_y = y * (1.0 - y / n);
    est.sigma = std::sqrt(var_x / (y * y) + x * x * var_y / (y * y * y * y));
    return est;
}

VisibilityEstimate run_visibility_experiment(const ChannelModel& channel, double mu,
                                             std::uint64_t n_pairs, const DetectorParams& det,
                                             StreamKey key, int threads, double input_delta) {
    det.validate();
    validate_channel(channel);
    if (!(mu > 0.0)) throw std::invalid_argument("run_visibility_experiment: mu must be > 0");
    if (n_pairs == 0) throw std::invalid_argument("run_visibility_experiment: n_pairs must be >= 1");

    const PolarizationState base = PolarizationState::balanced(input_delta);

    // Pulse-pair overlap magnitude by realized sign combination.
    double overlap[2][2] = {{1.0, 1.0}, {1.0, 1.0}};
    bool draw_signs = false;
    if (const auto* rot = std::get_if<RandomRotation>(&channel)) {
        const PolarizationState plus = rotate_state(base, rot->alpha0);
        const PolarizationState minus = rotate_state(base, -rot->alpha0);
        const PolarizationState* by_sign[2] = {&plus, &minus};
        for (int sa = 0; sa < 2; ++sa)
            for (int sb = 0; sb < 2; ++sb)
                overlap[sa][sb] = std::abs(state_overlap(*by_sign[sa], *by_sign[sb]));
        draw_signs = rot->pairing == PairingPolicy::IndependentFair;
        if (!draw_signs) overlap[0][0] = overlap[0][1];  // alternating: always (+, -)
    }

    const double eta_c = det.eta_os * det.eta1;
    const double eta_d = det.eta_os * det.eta2;
    // Reference pulses are orthogonal, so their output intensities carry no
    // interference term and are phase-independent: both are mu exactly.
    const double p_ref1 = click_probability(mu, eta_c, det.dark_prob);
    const double p_ref2 = click_probability(mu, eta_d, det.dark_prob);

    const double two_pi = 2.0 * std::acos(-1.0);

    struct Partial {
        std::uint64_t c_channel = 0;
        std::uint64_t c_reference = 0;
    };
    const std::uint64_t n_shards = shard_count(n_pairs);
    auto shard_fn = [&](std::size_t shard) {
        const std::uint64_t begin = shard * kPairsPerShard;
        const std::uint64_t end = std::min(n_pairs, begin + kPairsPerShard);
        RngStream rng(key.seed, key.stream_for_shard(shard));
        Partial part;
        for (std::uint64_t i = begin; i < end; ++i) {
            int sa = 0, sb = 0;
            if (draw_signs) {
                sa = rng.next_bernoulli(0.5) ? 0 : 1;
                sb = rng.next_bernoulli(0.5) ? 0 : 1;
            }
            const double psi = rng.next_uniform(0.0, two_pi);
            const auto [i_c, i_d] = splitter_intensities_reduced(mu, mu, overlap[sa][sb], psi);
            const bool ch1 = rng.next_bernoulli(click_probability(i_c, eta_c, det.dark_prob));
            const bool ch2 = rng.next_bernoulli(click_probability(i_d, eta_d, det.dark_prob));
            part.c_channel += (ch1 && ch2);
            const bool ref1 = rng.next_bernoulli(p_ref1);
            const bool ref2 = rng.next_bernoulli(p_ref2);
            part.c_reference += (ref1 && ref2);
        }
        return part;
    };

    std::uint64_t c_channel = 0, c_reference = 0;
    for (const auto& part : run_shards<Partial>(n_shards, threads, shard_fn)) {
        c_channel += part.c_channel;
        c_reference += part.c_reference;
    }
    return VisibilityEstimate::from_counts(c_channel, c_reference, n_pairs);
}

std::vector<VisibilityCell> visibility_surface(const std::vector<double>& mu_grid,
                                               const std::vector<double>& alpha0_grid,
                                               ChannelKind kind, PairingPolicy pairing,
                                               const DetectorParams& det, std::uint64_t n_pairs,
                                               StreamKey key, int threads, double input_delta) {
    if (mu_grid.empty() || alpha0_grid.empty())
        throw std::invalid_argument("visibility_surface: empty grid");
    std::vector<VisibilityCell> cells;
    cells.reserve(mu_grid.size() * alpha0_grid.size());
    std::uint64_t cell_index = 0;
    for (const double mu : mu_grid) {
        for (const double alpha0 : alpha0_grid) {
            ChannelModel channel;
            switch (kind) {
                case ChannelKind::IdealDepolarizing:
                    channel = IdealDepolarizing{1.0};
                    break;
                case ChannelKind::TimeEntanglement:
                    channel = TimeEntanglement{TemporalProfile(1.0, 0.0), {}};
                    break;
                case ChannelKind::RandomRotation:
                    channel = RandomRotation{alpha0, {}, pairing};
                    break;
            }
            VisibilityCell cell{mu, alpha0, std::nullopt};
            try {
                cell.est = run_visibility_experiment(channel, mu, n_pairs, det,
                                                     key.sub_experiment(cell_index), threads,
                                                     input_delta);
            } catch (const EstimationError&) {
                // flagged cell
            }
            cells.push_back(cell);
            ++cell_index;
        }
    }
    return cells;
}

double analytic_visibility_low_mu(ChannelKind kind, double alpha0) {
    const double pi = std::acos(-1.0);
    if (!(alpha0 >= 0.0 && alpha0 <= pi))
        throw std::invalid_argument("analytic_visibility_low_mu: alpha0 outside [0, pi]");
    if (kind == ChannelKind::RandomRotation) {
        const double c = std::cos(alpha0);
        return 0.5 * c * c;
    }
    return 0.5;
}

}  // namespace homsim
