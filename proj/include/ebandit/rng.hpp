#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace ebandit {

// Counter-based generator: every (seed, stream) pair owns an independent
// sequence, so replications can run in any order or thread layout and still
// reproduce bit-for-bit.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream + 0x1F123BB5159A55E5ULL))) {}

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Exponential with mean m > 0.
    double exponential(double m) { return -m * std::log1p(-next_double()); }

    // Index into a discrete distribution given by nonnegative weights
    // summing to ~1.
    std::size_t pick(std::span<const double> weights) {
        const double u = next_double();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace ebandit
