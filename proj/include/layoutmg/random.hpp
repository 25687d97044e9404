#pragma once

#include <cstdint>
#include <random>

namespace layoutmg {

/// Seedable source built on std::mt19937_64, whose output sequence is fixed by
/// the C++ standard. Conversions to doubles and indices are done here rather
/// than through <random> distributions, which differ between standard
/// libraries, so instances reproduce bit-for-bit everywhere.
class Random {
public:
    explicit Random(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    /// Uniform in [0, n); n > 0.
    std::size_t index(std::size_t n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return static_cast<std::size_t>(r % bound);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace layoutmg
