#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace kaczsketch {

/// Stateless seed combiner (splitmix64 finalizer). Used to derive independent
/// sub-stream seeds from (base seed, role, indices) so that every random
/// object in a run is reproducible from one base seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 0x632BE59BD9B4E019ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_seed(mix_seed(a, b), c);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                              std::uint64_t d) {
    return mix_seed(mix_seed(mix_seed(a, b), c), d);
}

/// FNV-1a, for folding string tags (method names) into seed derivations.
inline std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : tag) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Deterministic random stream. mt19937_64 output is fully specified by the
/// standard; uniforms and gaussians are derived with explicit arithmetic
/// (no std::*_distribution) so sequences are identical across toolchains.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Unbiased uniform integer in [0, n). Rejection sampling.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// +1 or -1 with equal probability.
    double sign() { return (gen_() & 1u) ? 1.0 : -1.0; }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// randperm(m, d): d distinct indices drawn uniformly without replacement
/// from [0, m), order significant. Sparse Fisher-Yates; O(d) time and space.
std::vector<std::size_t> sample_without_replacement(std::size_t m, std::size_t d,
                                                    RandomStream& rs);

}  // namespace kaczsketch
