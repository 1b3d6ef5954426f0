// Gibbs sampler over the unit square targeting a copula, plus the sample
// Kendall concordance diagnostic.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "copex/copula.hpp"
#include "copex/errors.hpp"
#include "copex/rng.hpp"

namespace copex {

struct ChainConfig {
    std::uint64_t burn_in = 5000;  // discarded leading pairs (m)
    std::uint64_t kept = 200000;   // pairs retained after burn-in (n)
    std::uint64_t thin = 1;        // keep every thin-th pair
    std::uint64_t seed = 1;
};

struct ChainOutput {
    std::vector<UnitPoint> pairs;      // the n kept pairs, in order
    std::uint64_t steps_executed = 0;  // burn_in + kept * thin full updates
    double sample_tau = 0.0;           // concordance of the kept pairs
    bool degenerate_map = false;       // comonotone/countermonotone chain
};

/// Sample Kendall tau (tau-b) of a pair sequence, O(n log n) via
/// merge-sort inversion counting (Knight's algorithm).
inline double sample_kendall_tau(const std::vector<UnitPoint>& pairs) {
    const std::size_t n = pairs.size();
    if (n < 2) raise(Errc::InsufficientData, "sample_kendall_tau: needs at least 2 pairs");

    std::vector<UnitPoint> sorted = pairs;
    std::sort(sorted.begin(), sorted.end(), [](const UnitPoint& a, const UnitPoint& b) {
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });

    // Tie counts: pairs tied in u, tied in both, then (after the merge
    // count) pairs tied in v alone.
    auto run_pairs = [](std::uint64_t len) { return len * (len - 1) / 2; };
    std::uint64_t ties_u = 0, ties_uv = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j].u == sorted[i].u) ++j;
        ties_u += run_pairs(j - i);
        for (std::size_t k = i; k < j;) {
            std::size_t l = k;
            while (l < n && sorted[l].u == sorted[k].u && sorted[l].v == sorted[k].v) ++l;
            ties_uv += run_pairs(l - k);
            k = l;
        }
        i = j;
    }

    // Count discordant pairs = inversions of the v sequence (strict), by
    // bottom-up merge sort.
    std::vector<double> v(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = sorted[i].v;
    std::uint64_t inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t a = lo, b = mid, out = lo;
            while (a < mid && b < hi) {
                if (v[b] < v[a]) {
                    inversions += mid - a;
                    buf[out++] = v[b++];
                } else {
                    buf[out++] = v[a++];
                }
            }
            while (a < mid) buf[out++] = v[a++];
            while (b < hi) buf[out++] = v[b++];
            std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
        }
    }

    std::uint64_t ties_v = 0;
    // v[] is now sorted; count its tie runs.
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && v[j] == v[i]) ++j;
        ties_v += run_pairs(j - i);
        i = j;
    }

    const double n0 = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    const double tu = static_cast<double>(ties_u);
    const double tv = static_cast<double>(ties_v);
    const double tuv = static_cast<double>(ties_uv);
    const double q = static_cast<double>(inversions);
    const double p = n0 - tu - tv + tuv - q; // concordant
    const double denom = std::sqrt((n0 - tu) * (n0 - tv));
    if (denom == 0.0) return 0.0;
    return (p - q) / denom;
}

/// Runs the two-step Gibbs kernel: from (u1,u2), draw u1' from U1|U2=u2 and
/// u2' from U2|U1=u1', both by inverse-transform of the h-function. The
/// chain is a pure function of (spec, config): identical inputs reproduce
/// identical output bit for bit.
inline ChainOutput run_chain(const CopulaSpec& spec, const ChainConfig& config) {
    validate(spec);
    if (config.kept < 1) raise(Errc::ParamOutOfDomain, "run_chain: kept must be >= 1");
    if (config.thin < 1) raise(Errc::ParamOutOfDomain, "run_chain: thin must be >= 1");

    SplitMix64 rng(config.seed);
    const auto clamp_unit = [](double x) {
        return std::clamp(x, uniform_eps, 1.0 - uniform_eps);
    };

    ChainOutput out;
    out.degenerate_map =
        spec.family == CopulaFamily::Comonotone || spec.family == CopulaFamily::Countermonotone;
    out.pairs.reserve(config.kept);

    // Step 1: initial uniform draw, then the first conditional completes the
    // first pair.
    double u1 = rng.next_uniform();
    double u2 = clamp_unit(conditional_quantile(spec, u1, rng.next_uniform()));
    std::uint64_t steps = 1;

    const std::uint64_t total = config.burn_in + config.kept * config.thin;
    while (true) {
        if (steps > config.burn_in && (steps - config.burn_in) % config.thin == 0)
            out.pairs.push_back({u1, u2});
        if (steps == total) break;
        u1 = clamp_unit(conditional_quantile(spec, u2, rng.next_uniform()));
        u2 = clamp_unit(conditional_quantile(spec, u1, rng.next_uniform()));
        ++steps;
    }

    out.steps_executed = steps;
    out.sample_tau = out.pairs.size() >= 2 ? sample_kendall_tau(out.pairs) : 0.0;
    return out;
}

/// Exact i.i.d. sampling from the copula: u uniform, v = h^{-1}(w|u).
/// Used by the synthetic-data generator; pricing keeps the Gibbs kernel.
inline std::vector<UnitPoint> sample_iid(const CopulaSpec& spec, std::size_t n, std::uint64_t seed) {
    validate(spec);
    SplitMix64 rng(seed);
    std::vector<UnitPoint> pairs;
    pairs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.next_uniform();
        const double w = rng.next_uniform();
        const double v = std::clamp(conditional_quantile(spec, u, w), uniform_eps, 1.0 - uniform_eps);
        pairs.push_back({u, v});
    }
    return pairs;
}

} // namespace copex
