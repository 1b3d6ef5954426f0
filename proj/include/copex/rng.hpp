// Deterministic uniform generator and stream derivation.
//
// SplitMix64 (Steele, Lea & Flood; Vigna's reference constants): the state
// walks a Weyl sequence and the output is a bijective mix of the state, so
// the k-th draw is a pure function of (seed, k). Reproducibility across runs
// and platforms is a contract of the sampler, hence a fixed published
// algorithm instead of std::mt19937_64 (whose seeding is unspecified enough
// to invite drift between standard library versions).

#pragma once

#include <cstdint>

namespace copex {

namespace detail {
inline constexpr std::uint64_t splitmix_gamma = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
} // namespace detail

// Uniform draws are clamped into [uniform_eps, 1 - uniform_eps] so quantile
// transforms never see an exact 0 or 1.
inline constexpr double uniform_eps = 1e-15;

class SplitMix64 {
  public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        state_ += detail::splitmix_gamma;
        return detail::mix64(state_);
    }

    /// Uniform double in the open interval (0,1), clamped to [1e-15, 1-1e-15].
    double next_uniform() noexcept {
        // 53-bit mantissa drawn from the top bits; value in [0, 1).
        double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        if (u < uniform_eps) return uniform_eps;
        if (u > 1.0 - uniform_eps) return 1.0 - uniform_eps;
        return u;
    }

  private:
    std::uint64_t state_;
};

/// Derives an independent 64-bit stream seed from (base seed, stream index).
/// Both inputs pass through the SplitMix64 finalizer, so neighbouring
/// indices produce statistically unrelated streams.
inline constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) noexcept {
    return detail::mix64(seed ^ detail::mix64(index + detail::splitmix_gamma));
}

} // namespace copex
