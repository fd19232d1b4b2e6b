#include <doctest.h>

#include <cmath>
#include <map>

#include "homsim/fock.hpp"
#include "oracles.hpp"

using namespace homsim;
using doctest::Approx;

namespace {
const double kPi = std::acos(-1.0);

Occupation occ_of(std::initializer_list<std::pair<int, int>> slots) {
    Occupation occ{};
    for (const auto& [slot, n] : slots) occ[slot] = static_cast<std::uint8_t>(n);
    return occ;
}

cd amp_at(const FockSuperposition& s, const Occupation& occ) {
    const auto it = s.terms().find(occ);
    return it == s.terms().end() ? cd(0.0) : it->second;
}

constexpr int AH = 0, AV = 1, BH = 2, CH = 4, CV = 5, DH = 6, DV = 7;
}  // namespace

TEST_CASE("single photon splits 50/50") {
    const auto in = FockSuperposition::single_photon(Spatial::A, PolarizationState(1.0, 0.0));
    const auto out = beamsplitter_transform(in);
    CHECK(out.terms().size() == 2);
    // a_H -> (d_H - i c_H)/sqrt(2)
    CHECK(std::abs(amp_at(out, occ_of({{CH, 1}})) - cd(0.0, -1.0 / std::sqrt(2.0))) < 1e-15);
    CHECK(std::abs(amp_at(out, occ_of({{DH, 1}})) - cd(1.0 / std::sqrt(2.0))) < 1e-15);
    CHECK(out.norm_sq() == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("identical photons bunch") {
    const auto psi = PolarizationState(1.0, 0.0);
    const auto out = beamsplitter_transform(FockSuperposition::two_photon_input(psi, psi));
    // amplitudes 1/sqrt(2) on |2>_c and |2>_d, no coincidence terms
    CHECK(std::abs(std::abs(amp_at(out, occ_of({{CH, 2}}))) - 1.0 / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(std::abs(amp_at(out, occ_of({{DH, 2}}))) - 1.0 / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(amp_at(out, occ_of({{CH, 1}, {DH, 1}}))) < 1e-14);
    CHECK(hom_coincidence_probability(psi, psi) < 1e-14);
}

TEST_CASE("two-photon output amplitudes for the +-alpha0 pair") {
    // Input (a_H + e^{i a} a_V)(b_H + e^{-i a} b_V)/2. Expanding through the
    // splitter map gives, up to a global phase,
    //   1/(2 sqrt 2) (|2>_CH + |2>_CV + |2>_DH + |2>_DV)
    //   + (cos a / 2) (|CH CV> + |DH DV>)
    //   - (sin a / 2) (|CH DV> - |CV DH>)
    // in normalized-state amplitudes.
    const double alpha = 0.83;
    const auto psi_a = rotate_state(PolarizationState::balanced(0.0), alpha);
    const auto psi_b = rotate_state(PolarizationState::balanced(0.0), -alpha);
    const auto out = beamsplitter_transform(FockSuperposition::two_photon_input(psi_a, psi_b));

    std::map<Occupation, cd> expected;
    const double s2 = 1.0 / (2.0 * std::sqrt(2.0));
    for (const int slot : {CH, CV, DH, DV}) expected[occ_of({{slot, 2}})] = s2;
    expected[occ_of({{CH, 1}, {CV, 1}})] = 0.5 * std::cos(alpha);
    expected[occ_of({{DH, 1}, {DV, 1}})] = 0.5 * std::cos(alpha);
    expected[occ_of({{CH, 1}, {DV, 1}})] = -0.5 * std::sin(alpha);
    expected[occ_of({{CV, 1}, {DH, 1}})] = 0.5 * std::sin(alpha);

    // fix the global phase on the |2>_CH term
    const cd g = amp_at(out, occ_of({{CH, 2}})) / s2;
    CHECK(std::abs(std::abs(g) - 1.0) < 1e-13);
    CHECK(out.terms().size() == expected.size());
    for (const auto& [occ, amp] : expected)
        CHECK(std::abs(amp_at(out, occ) - g * amp) < 1e-13);
}

TEST_CASE("coincidence probability follows the overlap law") {
    SUBCASE("rotation pairs give sin^2(alpha)/2") {
        for (const double alpha : {0.0, kPi / 8, kPi / 4, 1.0, kPi / 2}) {
            const auto a = rotate_state(PolarizationState::balanced(0.0), alpha);
            const auto b = rotate_state(PolarizationState::balanced(0.0), -alpha);
            const double s = std::sin(alpha);
            CHECK(hom_coincidence_probability(a, b) == Approx(0.5 * s * s).epsilon(1e-12));
        }
    }
    SUBCASE("orthogonal states give 1/2") {
        CHECK(hom_coincidence_probability(PolarizationState(1.0, 0.0),
                                          PolarizationState(0.0, 1.0)) ==
              Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("random pairs match the closed form and the symbolic oracle") {
        RngStream rng(41, 0);
        for (int i = 0; i < 500; ++i) {
            const auto a = oracles::random_state(rng);
            const auto b = oracles::random_state(rng);
            const double p = hom_coincidence_probability(a, b);
            const double law = 0.5 * (1.0 - std::norm(state_overlap(a, b)));
            CHECK(std::abs(p - law) < 1e-12);
            CHECK(std::abs(p - oracles::brute_force_hom_coincidence(a, b)) < 1e-12);
        }
    }
    SUBCASE("symmetry and common-unitary invariance") {
        RngStream rng(42, 0);
        for (int i = 0; i < 100; ++i) {
            const auto a = oracles::random_state(rng);
            const auto b = oracles::random_state(rng);
            CHECK(hom_coincidence_probability(a, b) ==
                  Approx(hom_coincidence_probability(b, a)).epsilon(1e-12));
            const Mat2 u = oracles::random_su2(rng);
            const auto ua = PolarizationState::normalized(
                u.a00 * a.amp_par() + u.a01 * a.amp_perp(),
                u.a10 * a.amp_par() + u.a11 * a.amp_perp());
            const auto ub = PolarizationState::normalized(
                u.a00 * b.amp_par() + u.a01 * b.amp_perp(),
                u.a10 * b.amp_par() + u.a11 * b.amp_perp());
            CHECK(hom_coincidence_probability(ua, ub) ==
                  Approx(hom_coincidence_probability(a, b)).epsilon(1e-11));
        }
    }
}

TEST_CASE("splitter preserves norm and photon number, rejects bad input") {
    RngStream rng(43, 0);
    for (int i = 0; i < 50; ++i) {
        const auto in = FockSuperposition::two_photon_input(oracles::random_state(rng),
                                                            oracles::random_state(rng));
        const auto out = beamsplitter_transform(in);
        CHECK(out.norm_sq() == Approx(in.norm_sq()).epsilon(1e-12));
        CHECK(out.total_photons() == 2);
        CHECK(out.lives_on_outputs());
    }
    // already on outputs
    FockSuperposition bad;
    bad.add(occ_of({{CH, 1}}), 1.0);
    CHECK_THROWS_AS(beamsplitter_transform(bad), std::invalid_argument);
    // more than two photons
    FockSuperposition three;
    three.add(occ_of({{AH, 2}, {BH, 1}}), 1.0);
    CHECK_THROWS_AS(beamsplitter_transform(three), std::invalid_argument);
    // occupation above the cap rejected at construction
    FockSuperposition overfull;
    CHECK_THROWS_AS(overfull.add(occ_of({{AH, 3}}), 1.0), std::invalid_argument);
    // mixed photon number across terms
    FockSuperposition mixed;
    mixed.add(occ_of({{AH, 1}}), std::sqrt(0.5));
    mixed.add(occ_of({{AH, 1}, {BH, 1}}), std::sqrt(0.5));
    CHECK_THROWS_AS(mixed.total_photons(), std::invalid_argument);
}

TEST_CASE("coincidence_with_losses reproduces the loss-scaled rate") {
    const auto plus = rotate_state(PolarizationState::balanced(0.0), kPi / 2);
    const auto minus = rotate_state(PolarizationState::balanced(0.0), -kPi / 2);
    DetectorParams ideal;
    CHECK(coincidence_with_losses(plus, minus, ideal, 0.5) == Approx(0.25).epsilon(1e-13));

    DetectorParams dead;
    dead.eta_os = 0.0;
    CHECK(coincidence_with_losses(plus, minus, dead, 0.5) == 0.0);

    DetectorParams half{1.0, 0.5, 0.5, 0.0};
    CHECK(coincidence_with_losses(plus, minus, half, 0.5) == Approx(0.0625).epsilon(1e-13));

    CHECK_THROWS_AS(coincidence_with_losses(plus, minus, ideal, 1.5), std::invalid_argument);
    DetectorParams bad{1.2, 1.0, 1.0, 0.0};
    CHECK_THROWS_AS(coincidence_with_losses(plus, minus, bad, 0.5), std::invalid_argument);
}

TEST_CASE("pair click model is a proper joint distribution") {
    RngStream rng(44, 0);
    for (int i = 0; i < 30; ++i) {
        const auto a = oracles::random_state(rng);
        const auto b = oracles::random_state(rng);
        const DetectorParams det{rng.next_uniform(0.2, 1.0), rng.next_uniform(0.2, 1.0),
                                 rng.next_uniform(0.2, 1.0), rng.next_uniform(0.0, 0.05)};
        const PairClickModel model(a, b, det);
        double total = 0.0;
        for (const auto& br : model.branches()) {
            total += br.prob;
            CHECK(br.prob >= 0.0);
            CHECK(br.p1 >= 0.0);
            CHECK(br.p1 <= 1.0);
            CHECK(br.p2 >= 0.0);
            CHECK(br.p2 <= 1.0);
        }
        CHECK(total == Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("dark-free coincidence equals the analytic loss formula") {
        RngStream rng2(45, 0);
        for (int i = 0; i < 30; ++i) {
            const auto a = oracles::random_state(rng2);
            const auto b = oracles::random_state(rng2);
            const DetectorParams det{rng2.next_uniform(0.0, 1.0), rng2.next_uniform(0.0, 1.0),
                                     rng2.next_uniform(0.0, 1.0), 0.0};
            const PairClickModel model(a, b, det);
            CHECK(model.coincidence_probability() ==
                  Approx(coincidence_with_losses(a, b, det, 1.0)).epsilon(1e-12));
        }
    }
    SUBCASE("sampling frequencies match the model probabilities") {
        const auto a = rotate_state(PolarizationState::balanced(0.0), 0.6);
        const auto b = rotate_state(PolarizationState::balanced(0.0), -0.6);
        const DetectorParams det{0.9, 0.7, 0.8, 0.01};
        const PairClickModel model(a, b, det);
        RngStream rng3(46, 0);
        const int n = 200000;
        int coinc = 0, s1 = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            const auto [c1, c2] = model.sample(rng3);
            coinc += (c1 && c2);
            s1 += c1;
            s2 += c2;
        }
        const auto close = [&](double freq, double p) {
            return std::abs(freq - p) < 4.0 * std::sqrt(p * (1.0 - p) / n);
        };
        CHECK(close(static_cast<double>(coinc) / n, model.coincidence_probability()));
        CHECK(close(static_cast<double>(s1) / n, model.click1_probability()));
        CHECK(close(static_cast<double>(s2) / n, model.click2_probability()));
    }
}

TEST_CASE("fock experiment statistics") {
    SUBCASE("depolarizing channels never produce coincidences without darks") {
        const ChannelModel te = TimeEntanglement{TemporalProfile(1e-9, 5e-9), {}};
        const auto counts = simulate_fock_experiment(te, 50000, DetectorParams{}, {3, 0});
        CHECK(counts.coincidences == 0);
        CHECK(counts.n_pairs == 50000);
        const ChannelModel dep = IdealDepolarizing{0.7};
        CHECK(simulate_fock_experiment(dep, 50000, DetectorParams{}, {3, 1}).coincidences == 0);
    }
    SUBCASE("pi/2 rotation with independent draws hits rate 1/4") {
        const ChannelModel rot = RandomRotation{kPi / 2, {}, PairingPolicy::IndependentFair};
        const auto counts = simulate_fock_experiment(rot, 1000000, DetectorParams{}, {5, 0});
        const double rate = static_cast<double>(counts.coincidences) / 1e6;
        CHECK(std::abs(rate - 0.25) < 0.0013);
    }
    SUBCASE("alternating pairing doubles the rate") {
        const ChannelModel rot = RandomRotation{kPi / 2, {}, PairingPolicy::Alternating};
        const auto counts = simulate_fock_experiment(rot, 200000, DetectorParams{}, {5, 1});
        const double rate = static_cast<double>(counts.coincidences) / 2e5;
        CHECK(std::abs(rate - 0.5) < 4.0 * std::sqrt(0.25 / 2e5));
    }
    SUBCASE("zero pairs give zero counts") {
        CHECK(simulate_fock_experiment(IdealDepolarizing{1.0}, 0, DetectorParams{}, {1, 0}) ==
              FockCounts{});
    }
    SUBCASE("monte carlo agrees with the analytic rate under losses") {
        const DetectorParams det{0.8, 0.6, 0.9, 0.0};
        const double alpha0 = kPi / 3;
        const ChannelModel rot = RandomRotation{alpha0, {}, PairingPolicy::IndependentFair};
        const std::uint64_t n = 200000;
        const auto counts = simulate_fock_experiment(rot, n, det, {6, 0});
        const auto plus = rotate_state(PolarizationState::balanced(0.0), alpha0);
        const auto minus = rotate_state(PolarizationState::balanced(0.0), -alpha0);
        const double p = coincidence_with_losses(plus, minus, det, 0.5);
        const double rate = static_cast<double>(counts.coincidences) / static_cast<double>(n);
        CHECK(std::abs(rate - p) < 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)));
    }
    SUBCASE("dark counts produce coincidences even under perfect bunching") {
        DetectorParams det;
        det.dark_prob = 0.01;
        const ChannelModel te = TimeEntanglement{TemporalProfile(1e-9, 5e-9), {}};
        const std::uint64_t n = 200000;
        const auto counts = simulate_fock_experiment(te, n, det, {7, 0});
        // bunched pair always fires one detector; the other needs a dark
        const double p = det.dark_prob;
        const double rate = static_cast<double>(counts.coincidences) / static_cast<double>(n);
        CHECK(std::abs(rate - p) < 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)));
    }
    SUBCASE("results are independent of the thread count") {
        const ChannelModel rot = RandomRotation{0.9, {}, PairingPolicy::IndependentFair};
        const DetectorParams det{0.9, 0.8, 0.7, 0.001};
        const auto serial = simulate_fock_experiment(rot, 300000, det, {8, 0}, 1);
        const auto parallel = simulate_fock_experiment(rot, 300000, det, {8, 0}, 4);
        CHECK(serial == parallel);
    }
}
