#include <doctest.h>

#include <cmath>

#include "homsim/discriminator.hpp"
#include "homsim/stats.hpp"
#include "oracles.hpp"

using namespace homsim;
using doctest::Approx;

namespace {
const double kPi = std::acos(-1.0);
const DetectorParams kIdeal{};

VisibilityEstimate synth(double v, double sigma) {
    VisibilityEstimate est;
    est.v = v;
    est.sigma = sigma;
    est.n_pairs = 1000000;
    est.coincidences_reference = 1000;
    est.coincidences_channel = static_cast<std::uint64_t>((1.0 - v) * 1000.0);
    return est;
}
}  // namespace

TEST_CASE("normal quantile and Wilson interval") {
    CHECK(inverse_normal_cdf(0.5) == Approx(0.0).epsilon(1e-12));
    CHECK(inverse_normal_cdf(0.975) == Approx(1.959963984540054).epsilon(1e-12));
    CHECK(inverse_normal_cdf(0.995) == Approx(2.5758293035489004).epsilon(1e-12));
    CHECK(inverse_normal_cdf(0.01) == Approx(-inverse_normal_cdf(0.99)).epsilon(1e-12));
    CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::invalid_argument);

    const auto ci = wilson_interval(50, 1000, 0.95);
    CHECK(ci.lo < 0.05);
    CHECK(ci.hi > 0.05);
    CHECK(ci.lo > 0.03);
    CHECK(ci.hi < 0.07);
    const auto zero = wilson_interval(0, 1000, 0.95);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi > 0.0);
}

TEST_CASE("single-photon verdict: any coincidence is conclusive") {
    const Verdict v = single_photon_verdict(1, 1000, kIdeal, 0.95);
    REQUIRE(std::holds_alternative<ConclusiveRandomRotation>(v));
    const auto& c = std::get<ConclusiveRandomRotation>(v);
    CHECK(c.ci_low <= c.alpha0_estimate);
    CHECK(c.alpha0_estimate <= c.ci_high);

    // rate 1/4 sin^2(a) inverts back to the planted angle
    const double alpha = kPi / 4;
    const std::uint64_t n = 100000;
    const auto planted = static_cast<std::uint64_t>(
        std::llround(0.25 * std::sin(alpha) * std::sin(alpha) * static_cast<double>(n)));
    const Verdict v2 = single_photon_verdict(planted, n, kIdeal, 0.95);
    const auto& c2 = std::get<ConclusiveRandomRotation>(v2);
    CHECK(c2.alpha0_estimate == Approx(alpha).epsilon(1e-3));
    CHECK(c2.ci_low < alpha);
    CHECK(c2.ci_high > alpha);
}

TEST_CASE("single-photon verdict: zero counts bound alpha0") {
    const Verdict v = single_photon_verdict(0, 10, kIdeal, 0.95);
    REQUIRE(std::holds_alternative<InconclusiveNoEvidence>(v));
    CHECK(std::get<InconclusiveNoEvidence>(v).alpha0_upper_bound > 0.5);  // 10 pairs say little

    const Verdict v2 = single_photon_verdict(0, 1000000, kIdeal, 0.99);
    const auto& ne = std::get<InconclusiveNoEvidence>(v2);
    CHECK(ne.confidence == 0.99);
    CHECK(ne.alpha0_upper_bound == Approx(4.2918e-3).epsilon(1e-3));

    // bisection oracle for the same bound: (1 - sin^2/4)^n = 1 - conf
    const auto miss_prob = [&](double a) {
        const double p = 0.25 * std::sin(a) * std::sin(a);
        return std::pow(1.0 - p, 1e6);
    };
    double lo = 0.0, hi = kPi / 2;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (miss_prob(mid) > 0.01 ? lo : hi) = mid;
    }
    CHECK(ne.alpha0_upper_bound == Approx(0.5 * (lo + hi)).epsilon(1e-9));
}

TEST_CASE("single-photon verdict: input validation") {
    CHECK_THROWS_AS(single_photon_verdict(0, 0, kIdeal, 0.95), std::invalid_argument);
    CHECK_THROWS_AS(single_photon_verdict(0, 10, kIdeal, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(single_photon_verdict(0, 10, kIdeal, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(single_photon_verdict(11, 10, kIdeal, 0.5), std::invalid_argument);
    DetectorParams dark;
    dark.dark_prob = 0.01;
    CHECK_THROWS_AS(single_photon_verdict(0, 10, dark, 0.95), std::invalid_argument);
    // a coincidence that the loss model cannot produce
    DetectorParams blind;
    blind.eta1 = 0.0;
    CHECK_THROWS_AS(single_photon_verdict(1, 10, blind, 0.95), std::domain_error);
}

TEST_CASE("alpha0 estimation inverts the visibility map") {
    SUBCASE("analytic limit at mu = 0") {
        CHECK(estimate_alpha0(0.5, 0.0, kIdeal) == Approx(0.0).epsilon(1e-12));
        CHECK(estimate_alpha0(0.25, 0.0, kIdeal) == Approx(kPi / 4).epsilon(1e-12));
        CHECK(estimate_alpha0(0.0, 0.0, kIdeal) == Approx(kPi / 2).epsilon(1e-12));
    }
    SUBCASE("round trip through the analytic law") {
        for (int i = 0; i <= 40; ++i) {
            const double alpha = (kPi / 2) * i / 40.0;
            const double v = analytic_visibility_low_mu(ChannelKind::RandomRotation, alpha);
            CHECK(std::abs(estimate_alpha0(v, 0.0, kIdeal) - alpha) < 1e-8);
        }
    }
    SUBCASE("round trip through the finite-mu model") {
        for (const double alpha : {0.15, 0.5, 0.9, 1.3, kPi / 2 - 0.05}) {
            const double c = std::cos(alpha);
            const double v = model_visibility(0.05, c * c, kIdeal);
            CHECK(std::abs(estimate_alpha0(v, 0.05, kIdeal) - alpha) < 1e-7);
        }
    }
    SUBCASE("edges and rejections") {
        CHECK(estimate_alpha0(model_visibility(0.05, 1.0, kIdeal), 0.05, kIdeal) ==
              Approx(0.0).epsilon(1e-8));
        CHECK(estimate_alpha0(0.0, 0.05, kIdeal) == Approx(kPi / 2).epsilon(1e-8));
        CHECK_THROWS_AS(estimate_alpha0(0.51, 0.05, kIdeal), std::domain_error);
        CHECK_THROWS_AS(estimate_alpha0(-0.01, 0.05, kIdeal), std::domain_error);
    }
}

TEST_CASE("coherent verdict branches") {
    const double mu = 0.01;
    const double v_max = model_visibility(mu, 1.0, kIdeal);
    SUBCASE("at the ceiling: inconclusive regardless of uncertainty") {
        const Verdict v = coherent_verdict(synth(0.5, 0.001), mu, kIdeal, 2.0);
        CHECK(std::holds_alternative<InconclusiveAtMaximum>(v));
        const Verdict tiny = coherent_verdict(synth(v_max + 0.01, 1e-6), mu, kIdeal, 2.0);
        CHECK(std::holds_alternative<InconclusiveAtMaximum>(tiny));
    }
    SUBCASE("high uncertainty: more data needed") {
        const Verdict v = coherent_verdict(synth(0.25, 0.15), mu, kIdeal, 2.0);
        REQUIRE(std::holds_alternative<InconclusiveInsufficientPrecision>(v));
        const double req = std::get<InconclusiveInsufficientPrecision>(v).required_sigma;
        CHECK(req == Approx((v_max - 0.25) / 2.0).epsilon(1e-9));
        // shrinking sigma below the requirement flips the verdict
        const Verdict v2 = coherent_verdict(synth(0.25, 0.9 * req), mu, kIdeal, 2.0);
        CHECK(std::holds_alternative<ConclusiveRandomRotation>(v2));
    }
    SUBCASE("small uncertainty, low visibility: conclusive with a covering CI") {
        const Verdict v = coherent_verdict(synth(0.1, 0.02), mu, kIdeal, 2.0);
        REQUIRE(std::holds_alternative<ConclusiveRandomRotation>(v));
        const auto& c = std::get<ConclusiveRandomRotation>(v);
        CHECK(c.alpha0_estimate == Approx(std::acos(std::sqrt(0.2))).epsilon(1e-3));
        CHECK(c.ci_low < c.alpha0_estimate);
        CHECK(c.ci_high > c.alpha0_estimate);
    }
    SUBCASE("negative fluctuations clamp to pi/2") {
        const Verdict v = coherent_verdict(synth(-0.01, 0.005), mu, kIdeal, 2.0);
        REQUIRE(std::holds_alternative<ConclusiveRandomRotation>(v));
        CHECK(std::get<ConclusiveRandomRotation>(v).ci_high == Approx(kPi / 2).epsilon(1e-9));
    }
    SUBCASE("rejections") {
        CHECK_THROWS_AS(coherent_verdict(synth(0.1, 0.02), 0.0, kIdeal, 2.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(coherent_verdict(synth(0.1, 0.02), mu, kIdeal, 0.0),
                        std::invalid_argument);
        VisibilityEstimate bad = synth(0.1, 0.02);
        bad.coincidences_reference = 0;
        CHECK_THROWS_AS(coherent_verdict(bad, mu, kIdeal, 2.0), std::invalid_argument);
    }
}

TEST_CASE("verdict pipeline on simulated channels") {
    SUBCASE("rotation channel yields a conclusive verdict with a covering CI") {
        const double alpha0 = 3 * kPi / 8;
        const ChannelModel rot = RandomRotation{alpha0, {}, PairingPolicy::Alternating};
        const auto est = run_visibility_experiment(rot, 0.05, 400000, kIdeal, {81, 0});
        const Verdict v = coherent_verdict(est, 0.05, kIdeal, 1.96);
        REQUIRE(std::holds_alternative<ConclusiveRandomRotation>(v));
        const auto& c = std::get<ConclusiveRandomRotation>(v);
        CHECK(c.ci_low <= alpha0);
        CHECK(alpha0 <= c.ci_high);
    }
    SUBCASE("depolarizing channel is never called conclusive at k = 3") {
        int conclusive = 0;
        for (int rep = 0; rep < 60; ++rep) {
            const ChannelModel te = TimeEntanglement{TemporalProfile(1e-9, 3e-9), {}};
            const auto est =
                run_visibility_experiment(te, 0.1, 50000, kIdeal, {82, 100 + (std::uint64_t)rep});
            const Verdict v = coherent_verdict(est, 0.1, kIdeal, 3.0);
            conclusive += std::holds_alternative<ConclusiveRandomRotation>(v);
        }
        CHECK(conclusive == 0);
    }
}

TEST_CASE("required pairs sizes experiments sensibly") {
    SUBCASE("larger mu needs fewer pairs") {
        const std::uint64_t n_small = required_pairs(0.01, kPi / 4, kIdeal, 2.0);
        const std::uint64_t n_large = required_pairs(0.1, kPi / 4, kIdeal, 2.0);
        CHECK(n_large < n_small);
    }
    SUBCASE("vanishing margin diverges") {
        const std::uint64_t n1 = required_pairs(0.05, 0.1, kIdeal, 2.0);
        const std::uint64_t n2 = required_pairs(0.05, 0.01, kIdeal, 2.0);
        const std::uint64_t n3 = required_pairs(0.05, 0.001, kIdeal, 2.0);
        CHECK(n1 < n2);
        CHECK(n2 < n3);
        CHECK(n3 > 100000000ull);
    }
    SUBCASE("planned run is conclusive in >= 90% of replicates") {
        const double alpha0 = kPi / 2;
        const std::uint64_t n = required_pairs(0.05, alpha0, kIdeal, 2.0);
        CHECK(n < 10000000ull);
        const ChannelModel rot = RandomRotation{alpha0, {}, PairingPolicy::Alternating};
        int conclusive = 0;
        for (int rep = 0; rep < 100; ++rep) {
            const auto est =
                run_visibility_experiment(rot, 0.05, n, kIdeal, {83, 200 + (std::uint64_t)rep});
            conclusive += std::holds_alternative<ConclusiveRandomRotation>(
                coherent_verdict(est, 0.05, kIdeal, 2.0));
        }
        CHECK(conclusive >= 90);
    }
    SUBCASE("rejections") {
        CHECK_THROWS_AS(required_pairs(0.05, 0.0, kIdeal, 2.0), std::invalid_argument);
        CHECK_THROWS_AS(required_pairs(0.0, 0.5, kIdeal, 2.0), std::invalid_argument);
    }
}

TEST_CASE("more data never weakens a verdict on noiseless synthetic counts") {
    const double mu = 0.05;
    for (const double alpha0 : {kPi / 8, kPi / 4, 3 * kPi / 8, kPi / 2}) {
        const double c = std::cos(alpha0);
        const double p_ch = oracles::coherent_click_closed_form(mu, std::abs(c), 1.0, 1.0);
        const double p_ref = oracles::coherent_click_closed_form(mu, 0.0, 1.0, 1.0);
        bool was_conclusive = false;
        for (std::uint64_t n = 1u << 16; n <= (1u << 26); n <<= 1) {
            const auto c_ch = static_cast<std::uint64_t>(p_ch * static_cast<double>(n));
            const auto c_ref = static_cast<std::uint64_t>(p_ref * static_cast<double>(n));
            if (c_ref == 0) continue;
            const auto est = VisibilityEstimate::from_counts(c_ch, c_ref, n);
            const bool conclusive = std::holds_alternative<ConclusiveRandomRotation>(
                coherent_verdict(est, mu, kIdeal, 2.0));
            if (was_conclusive) CHECK(conclusive);
            was_conclusive = was_conclusive || conclusive;
        }
        CHECK(was_conclusive);
    }
}
