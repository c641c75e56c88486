#pragma once

#include <cstdint>
#include <vector>

namespace coalopt {

/// splitmix64 finalizer; bijective mixing of a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream key from a seed plus up to three stream
/// coordinates (for example generation, individual index, purpose tag).
/// Identical inputs always yield the identical stream, so random draws do
/// not depend on evaluation order or thread scheduling.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                                      std::uint64_t b = 0, std::uint64_t c = 0) {
    constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
    std::uint64_t h = seed + 0x632BE59BD9B4E019ULL;
    h = mix64(h + kGolden * a + 1);
    h = mix64(h + kGolden * b + 2);
    h = mix64(h + kGolden * c + 3);
    return h;
}

/// Small deterministic PRNG (splitmix64). Cheap to construct, so a fresh
/// instance is made per stream rather than shared across threads.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform_in(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Uniform integer in [0, n). Requires n > 0.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace coalopt
