#pragma once

#include <cstdint>
#include <random>

namespace pentropy {

// Reproducible uniform stream keyed by (seed, stream_id). Equal keys replay
// the identical sequence bit for bit; distinct stream_ids give independent
// streams, which is how parallel trials stay deterministic: trial i runs on
// stream_id = base_id + i regardless of scheduling.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Uniform double in [0, 1) with 53-bit resolution.
    double next_uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::uint64_t next_u64() { return engine_(); }

    // Stream for a derived unit of work (trial, worker, ...).
    RandomStream derived(std::uint64_t offset) const {
        return RandomStream(seed_, stream_id_ + offset);
    }

private:
    static std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed),
                          static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id),
                          static_cast<std::uint32_t>(stream_id >> 32)};
        return std::mt19937_64(seq);
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

}  // namespace pentropy
