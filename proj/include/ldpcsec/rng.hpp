#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>

namespace ldpcsec {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
}
}  // namespace detail

/// Counter-based 64-bit generator (splitmix64 stream). Output i is a pure
/// function of (seed, i), so streams are reproducible across platforms and
/// cheap to fork per trial.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Unbiased uniform draw from [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
        for (;;) {
            std::uint64_t x = next_u64();
            if (x >= threshold) return x % bound;
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t state_;
};

/// Hash a tuple of words into a child seed. Used to derive independent
/// per-trial streams from (master_seed, n, eps, trial, tag) without any
/// sequential dependence between trials.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) {
    std::uint64_t s = 0x243f6a8885a308d3ULL;
    for (std::uint64_t w : words) {
        s = detail::mix64(s ^ w) + 0x9e3779b97f4a7c15ULL;
    }
    return detail::mix64(s);
}

inline std::uint64_t double_bits(double x) { return std::bit_cast<std::uint64_t>(x); }

}  // namespace ldpcsec
