#ifndef HOMSIM_RNG_HPP
#define HOMSIM_RNG_HPP

#include <array>
#include <cstdint>

namespace homsim {

// Philox4x32-10 counter-based generator. A stream is addressed by
// (seed, stream_id); the seed forms the key and the stream id occupies the
// two high counter words, so any (seed, stream) pair yields a statistically
// independent sequence without shared state. This is what makes sharded
// Monte Carlo runs reproducible independently of thread count: shard i of a
// run always draws from stream base+i no matter which thread executes it.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            if (round != 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

// Identifies one logical random stream. experiment_id partitions the 64-bit
// stream space so that independent runs (sweep cells, replicates, the
// channel/reference halves of an experiment) never collide: stream =
// experiment_id * 2^32 + shard.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t experiment_id = 0;

    std::uint64_t stream_for_shard(std::uint64_t shard) const {
        return (experiment_id << 32) | (shard & 0xFFFFFFFFu);
    }
    StreamKey sub_experiment(std::uint64_t offset) const {
        return StreamKey{seed, experiment_id + offset};
    }
};

class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_id_(stream_id) {}

    std::uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool next_bernoulli(double p) { return next_double() < p; }

  private:
    void refill() {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(block_index_),
            static_cast<std::uint32_t>(block_index_ >> 32),
            static_cast<std::uint32_t>(stream_id_),
            static_cast<std::uint32_t>(stream_id_ >> 32)};
        buf_ = Philox4x32::block(ctr, key_);
        ++block_index_;
        pos_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_id_;
    std::uint64_t block_index_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

}  // namespace homsim

#endif
