#include "homsim/fock.hpp"

#include <cmath>
#include <stdexcept>

#include "homsim/exec.hpp"

namespace homsim {

namespace {

constexpr double kAmpEps = 1e-15;

double factorial_small(int n) {
    static const double table[] = {1.0, 1.0, 2.0};
    return table[n];
}

// sqrt(prod n_k!) over an occupation vector; occupations are <= 2.
double norm_factor(const Occupation& occ) {
    double f = 1.0;
    for (const auto n : occ) f *= factorial_small(n);
    return std::sqrt(f);
}

int photons_in(const Occupation& occ, Spatial s) {
    return occ[mode_index(s, Pol::H)] + occ[mode_index(s, Pol::V)];
}

}  // namespace

void FockSuperposition::add(const Occupation& occ, cd amp) {
    for (const auto n : occ)
        if (n > kMaxOccupation)
            throw std::invalid_argument("FockSuperposition: occupation above cap");
    auto [it, inserted] = terms_.try_emplace(occ, amp);
    if (!inserted) {
        it->second += amp;
        if (std::abs(it->second) <= kAmpEps) terms_.erase(it);
    }
}

double FockSuperposition::norm_sq() const {
    double s = 0.0;
    for (const auto& [occ, amp] : terms_) s += std::norm(amp);
    return s;
}

void FockSuperposition::normalize() {
    const double n = std::sqrt(norm_sq());
    if (n == 0.0) throw std::invalid_argument("FockSuperposition: cannot normalize zero state");
    for (auto& [occ, amp] : terms_) amp /= n;
}

int FockSuperposition::total_photons() const {
    int total = -1;
    for (const auto& [occ, amp] : terms_) {
        int t = 0;
        for (const auto n : occ) t += n;
        if (total == -1) total = t;
        if (t != total)
            throw std::invalid_argument("FockSuperposition: mixed photon number across terms");
    }
    return total < 0 ? 0 : total;
}

bool FockSuperposition::lives_on_inputs() const {
    for (const auto& [occ, amp] : terms_)
        if (photons_in(occ, Spatial::C) != 0 || photons_in(occ, Spatial::D) != 0) return false;
    return true;
}

bool FockSuperposition::lives_on_outputs() const {
    for (const auto& [occ, amp] : terms_)
        if (photons_in(occ, Spatial::A) != 0 || photons_in(occ, Spatial::B) != 0) return false;
    return true;
}

FockSuperposition FockSuperposition::single_photon(Spatial s, const PolarizationState& psi) {
    FockSuperposition out;
    const cd comps[2] = {psi.amp_par(), psi.amp_perp()};
    for (int p = 0; p < 2; ++p) {
        if (std::abs(comps[p]) <= kAmpEps) continue;
        Occupation occ{};
        occ[mode_index(s, static_cast<Pol>(p))] = 1;
        out.add(occ, comps[p]);
    }
    return out;
}

FockSuperposition FockSuperposition::two_photon_input(const PolarizationState& a,
                                                      const PolarizationState& b) {
    FockSuperposition out;
    const cd ca[2] = {a.amp_par(), a.amp_perp()};
    const cd cb[2] = {b.amp_par(), b.amp_perp()};
    for (int pa = 0; pa < 2; ++pa) {
        for (int pb = 0; pb < 2; ++pb) {
            const cd amp = ca[pa] * cb[pb];
            if (std::abs(amp) <= kAmpEps) continue;
            Occupation occ{};
            occ[mode_index(Spatial::A, static_cast<Pol>(pa))] = 1;
            occ[mode_index(Spatial::B, static_cast<Pol>(pb))] = 1;
            out.add(occ, amp);
        }
    }
    return out;
}

FockSuperposition beamsplitter_transform(const FockSuperposition& state) {
    if (!state.lives_on_inputs())
        throw std::invalid_argument("beamsplitter_transform: state has photons on output modes");
    if (state.total_photons() > kMaxTotalPhotons)
        throw std::invalid_argument("beamsplitter_transform: more than two photons");

    const double r = 1.0 / std::sqrt(2.0);
    const cd mi(0.0, -1.0);

    FockSuperposition out;
    for (const auto& [occ, amp] : state.terms()) {
        // Expand the creation-operator monomial photon by photon. Each entry
        // holds a partial output occupation and the accumulated coefficient of
        // the corresponding operator monomial.
        std::vector<std::pair<Occupation, cd>> poly;
        poly.emplace_back(Occupation{}, amp / norm_factor(occ));
        for (int slot = 0; slot < 4; ++slot) {
            const auto spatial = static_cast<Spatial>(slot / 2);
            const auto pol = static_cast<Pol>(slot % 2);
            const int c_slot = mode_index(Spatial::C, pol);
            const int d_slot = mode_index(Spatial::D, pol);
            // a_p -> (d_p - i c_p)/sqrt(2);  b_p -> (c_p - i d_p)/sqrt(2)
            const cd c_coef = (spatial == Spatial::A) ? mi * r : cd(r);
            const cd d_coef = (spatial == Spatial::A) ? cd(r) : mi * r;
            for (int k = 0; k < occ[slot]; ++k) {
                std::vector<std::pair<Occupation, cd>> next;
                next.reserve(poly.size() * 2);
                for (const auto& [part, coef] : poly) {
                    auto with_c = part;
                    ++with_c[c_slot];
                    next.emplace_back(with_c, coef * c_coef);
                    auto with_d = part;
                    ++with_d[d_slot];
                    next.emplace_back(with_d, coef * d_coef);
                }
                poly.swap(next);
            }
        }
        for (const auto& [mono, coef] : poly) out.add(mono, coef * norm_factor(mono));
    }
    return out;
}

double hom_coincidence_probability(const PolarizationState& a, const PolarizationState& b) {
    const FockSuperposition out = beamsplitter_transform(FockSuperposition::two_photon_input(a, b));
    double p = 0.0;
    for (const auto& [occ, amp] : out.terms())
        if (photons_in(occ, Spatial::C) >= 1 && photons_in(occ, Spatial::D) >= 1)
            p += std::norm(amp);
    return p;
}

void DetectorParams::validate() const {
    if (!(eta_os >= 0.0 && eta_os <= 1.0))
        throw std::invalid_argument("DetectorParams: eta_os outside [0, 1]");
    if (!(eta1 >= 0.0 && eta1 <= 1.0))
        throw std::invalid_argument("DetectorParams: eta1 outside [0, 1]");
    if (!(eta2 >= 0.0 && eta2 <= 1.0))
        throw std::invalid_argument("DetectorParams: eta2 outside [0, 1]");
    if (!(dark_prob >= 0.0 && dark_prob < 1.0))
        throw std::invalid_argument("DetectorParams: dark_prob outside [0, 1)");
}

double coincidence_with_losses(const PolarizationState& a, const PolarizationState& b,
                               const DetectorParams& det, double p_differ) {
    det.validate();
    if (!(p_differ >= 0.0 && p_differ <= 1.0))
        throw std::invalid_argument("coincidence_with_losses: p_differ outside [0, 1]");
    return p_differ * det.eta_os * det.eta_os * det.eta1 * det.eta2 *
           hom_coincidence_probability(a, b);
}

PairClickModel::PairClickModel(const PolarizationState& a, const PolarizationState& b,
                               const DetectorParams& det) {
    det.validate();
    const double d = det.dark_prob;
    const auto with_dark = [d](double p) { return 1.0 - (1.0 - p) * (1.0 - d); };
    // Threshold detector: n photons present, each seen with efficiency eta.
    const auto detect = [](double eta, int n) { return 1.0 - std::pow(1.0 - eta, n); };

    const double t = det.eta_os;
    // Both photons pass the switch: exact interference distribution.
    if (t > 0.0) {
        const FockSuperposition out =
            beamsplitter_transform(FockSuperposition::two_photon_input(a, b));
        // Merge output terms by photon counts at C and D.
        double routing[3][3] = {};
        for (const auto& [occ, amp] : out.terms())
            routing[photons_in(occ, Spatial::C)][photons_in(occ, Spatial::D)] += std::norm(amp);
        for (int kc = 0; kc <= 2; ++kc)
            for (int kd = 0; kd <= 2; ++kd)
                if (routing[kc][kd] > 0.0)
                    branches_.push_back({t * t * routing[kc][kd],
                                         with_dark(detect(det.eta1, kc)),
                                         with_dark(detect(det.eta2, kd))});
        // One photon lost in the switch: the survivor exits C or D with
        // probability 1/2 each (both pair members give the same branches).
        const double one = 2.0 * t * (1.0 - t);
        if (one > 0.0) {
            branches_.push_back({0.5 * one, with_dark(det.eta1), with_dark(0.0)});
            branches_.push_back({0.5 * one, with_dark(0.0), with_dark(det.eta2)});
        }
    }
    // Neither photon survives.
    const double none = (1.0 - t) * (1.0 - t);
    if (none > 0.0) branches_.push_back({none, with_dark(0.0), with_dark(0.0)});
}

double PairClickModel::coincidence_probability() const {
    double p = 0.0;
    for (const auto& br : branches_) p += br.prob * br.p1 * br.p2;
    return p;
}

double PairClickModel::click1_probability() const {
    double p = 0.0;
    for (const auto& br : branches_) p += br.prob * br.p1;
    return p;
}

double PairClickModel::click2_probability() const {
    double p = 0.0;
    for (const auto& br : branches_) p += br.prob * br.p2;
    return p;
}

std::pair<bool, bool> PairClickModel::sample(RngStream& rng) const {
    double u = rng.next_double();
    const Branch* chosen = &branches_.back();
    for (const auto& br : branches_) {
        if (u < br.prob) {
            chosen = &br;
            break;
        }
        u -= br.prob;
    }
    const bool c1 = rng.next_bernoulli(chosen->p1);
    const bool c2 = rng.next_bernoulli(chosen->p2);
    return {c1, c2};
}

FockCounts simulate_fock_experiment(const ChannelModel& channel, std::uint64_t n_pairs,
                                    const DetectorParams& det, StreamKey key, int threads,
                                    double input_delta) {
    det.validate();
    validate_channel(channel);
    if (n_pairs == 0) return FockCounts{};

    const PolarizationState base = PolarizationState::balanced(input_delta);

    // Realized pair states take at most four values per run, so the exact
    // click models are prebuilt and the per-pair work is a table lookup.
    bool draw_signs = false;
    std::array<std::array<PairClickModel, 2>, 2> models;
    if (const auto* rot = std::get_if<RandomRotation>(&channel)) {
        const PolarizationState plus = rotate_state(base, rot->alpha0);
        const PolarizationState minus = rotate_state(base, -rot->alpha0);
        const PolarizationState* by_sign[2] = {&plus, &minus};
        for (int sa = 0; sa < 2; ++sa)
            for (int sb = 0; sb < 2; ++sb)
                models[sa][sb] = PairClickModel(*by_sign[sa], *by_sign[sb], det);
        draw_signs = rot->pairing == PairingPolicy::IndependentFair;
        if (!draw_signs) models[0][0] = models[0][1];  // alternating: always (+, -)
    } else {
        // Depolarizing kinds: every photon is in the same (channel-entangled)
        // state, so consecutive photons interfere perfectly.
        models[0][0] = PairClickModel(base, base, det);
    }
    const bool rotation = std::holds_alternative<RandomRotation>(channel);

    const std::uint64_t n_shards = shard_count(n_pairs);
    auto shard_fn = [&](std::size_t shard) {
        const std::uint64_t begin = shard * kPairsPerShard;
        const std::uint64_t end = std::min(n_pairs, begin + kPairsPerShard);
        RngStream rng(key.seed, key.stream_for_shard(shard));
        FockCounts c;
        c.n_pairs = end - begin;
        for (std::uint64_t i = begin; i < end; ++i) {
            int sa = 0, sb = 0;
            if (rotation && draw_signs) {
                sa = rng.next_bernoulli(0.5) ? 0 : 1;
                sb = rng.next_bernoulli(0.5) ? 0 : 1;
            }
            const auto [c1, c2] = models[sa][sb].sample(rng);
            c.singles1 += c1;
            c.singles2 += c2;
            c.coincidences += (c1 && c2);
        }
        return c;
    };

    FockCounts total;
    for (const auto& part : run_shards<FockCounts>(n_shards, threads, shard_fn)) total += part;
    return total;
}

}  // namespace homsim
