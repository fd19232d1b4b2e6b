// Compares the serial reference path against the OpenMP path for the two
// Monte Carlo engines and checks that the merged counts agree exactly.
//
// Usage: bench_threads [n_pairs]   (default 4000000)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "homsim/coherent.hpp"
#include "homsim/exec.hpp"
#include "homsim/fock.hpp"

using namespace homsim;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class Fn>
double timed(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return seconds_since(t0);
}

}  // namespace

int main(int argc, char** argv) {
    const std::uint64_t n_pairs = (argc > 1) ? std::strtoull(argv[1], nullptr, 10) : 4000000ull;
    const double pi = std::acos(-1.0);
    const ChannelModel channel = RandomRotation{pi / 4, {}, PairingPolicy::IndependentFair};
    const DetectorParams det{0.9, 0.8, 0.8, 0.0};
    const StreamKey key{2024, 0};

    std::vector<int> thread_counts = {1, 2, 4};
    if (const int hw = resolve_threads(0); hw > 4) thread_counts.push_back(hw);

    std::printf("n_pairs %llu, %llu shards of %u pairs\n",
                static_cast<unsigned long long>(n_pairs),
                static_cast<unsigned long long>(shard_count(n_pairs)),
                static_cast<unsigned>(kPairsPerShard));

    std::printf("\nfock simulator\n");
    FockCounts fock_ref;
    double fock_ref_t = 0.0;
    for (const int t : thread_counts) {
        FockCounts counts;
        const double dt = timed([&] { counts = simulate_fock_experiment(channel, n_pairs, det, key, t); });
        const bool ok = (t == thread_counts.front()) || counts == fock_ref;
        if (t == thread_counts.front()) {
            fock_ref = counts;
            fock_ref_t = dt;
        }
        std::printf("  threads %2d  %7.3f s  %8.2f Mpairs/s  speedup %5.2f  %s\n", t, dt,
                    n_pairs / dt / 1e6, fock_ref_t / dt, ok ? "counts match" : "COUNTS DIFFER");
    }

    std::printf("\ncoherent visibility simulator (mu = 0.05)\n");
    VisibilityEstimate coh_ref;
    double coh_ref_t = 0.0;
    for (const int t : thread_counts) {
        VisibilityEstimate est;
        const double dt =
            timed([&] { est = run_visibility_experiment(channel, 0.05, n_pairs, det, key, t); });
        const bool ok = (t == thread_counts.front()) ||
                        (est.coincidences_channel == coh_ref.coincidences_channel &&
                         est.coincidences_reference == coh_ref.coincidences_reference);
        if (t == thread_counts.front()) {
            coh_ref = est;
            coh_ref_t = dt;
        }
        std::printf("  threads %2d  %7.3f s  %8.2f Mpairs/s  speedup %5.2f  %s\n", t, dt,
                    n_pairs / dt / 1e6, coh_ref_t / dt, ok ? "counts match" : "COUNTS DIFFER");
    }
    return 0;
}
