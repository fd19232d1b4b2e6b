#ifndef HOMSIM_EXEC_HPP
#define HOMSIM_EXEC_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace homsim {

inline int resolve_threads(int requested) {
#if defined(_OPENMP)
    if (requested <= 0) return omp_get_max_threads();
    return requested;
#else
    (void)requested;
    return 1;
#endif
}

// Runs fn(shard) for every shard and returns the results in shard order.
// threads == 1 takes the plain serial loop (the reference path); anything
// else fans the shards out over OpenMP. Each shard owns its RNG stream and
// writes only its own slot, so the two paths produce identical results and
// the merged output does not depend on the thread count.
template <class Partial, class Fn>
std::vector<Partial> run_shards(std::size_t n_shards, int threads, Fn&& fn) {
    std::vector<Partial> parts(n_shards);
    const int n_threads = resolve_threads(threads);
    if (n_threads == 1 || n_shards <= 1) {
        for (std::size_t i = 0; i < n_shards; ++i) parts[i] = fn(i);
        return parts;
    }
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
    for (long long i = 0; i < static_cast<long long>(n_shards); ++i)
        parts[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < n_shards; ++i) parts[i] = fn(i);
#endif
    return parts;
}

// Shard size for Monte Carlo pair loops. Fixed (not a function of the thread
// count) so the shard -> stream mapping is stable.
inline constexpr std::uint64_t kPairsPerShard = 1u << 16;

inline std::uint64_t shard_count(std::uint64_t n_items) {
    if (n_items == 0) return 0;
    return (n_items - 1) / kPairsPerShard + 1;
}

}  // namespace homsim

#endif
