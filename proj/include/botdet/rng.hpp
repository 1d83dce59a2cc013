#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace botdet {

/// Seeded RNG with platform-stable output. mt19937_64 output is pinned by
/// the standard; the bounded/real mappings below are ours, so identical
/// seeds give identical streams on any toolchain (std distributions don't).
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound > 0.
    uint64_t below(uint64_t bound) {
        // rejection sampling, no modulo bias
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

    /// Uniform integer in [lo, hi] inclusive.
    int64_t range(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo) + 1));
    }

    /// Uniform double in (0, 1].
    double open_unit() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
    }

    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

private:
    std::mt19937_64 engine_;
};

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Independent substream seed for entity `index` of class `tag`.
inline uint64_t substream_seed(uint64_t master, std::string_view tag, uint64_t index) {
    return splitmix64(master ^ splitmix64(fnv1a64(tag) + 0x9e3779b97f4a7c15ULL * index));
}

}  // namespace botdet
