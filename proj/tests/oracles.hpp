// Test-only reference implementations, kept independent of the library code
// paths they are used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "copex/copula.hpp"

namespace oracle {

// Long-double complementary error function: Maclaurin series for small
// arguments, the classical continued fraction (A&S 7.1.14, modified Lentz)
// for large ones. Accuracy ~1e-18, well inside what the double-precision
// library functions are asserted against.
inline long double erfc_ld(long double x) {
    const long double ax = std::fabs(x);
    long double result;
    if (ax < 2.0L) {
        // erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
        const long double two_over_sqrt_pi = 1.1283791670955125738961589031215L;
        long double term = x;
        long double sum = x;
        const long double x2 = x * x;
        for (int n = 1; n < 120; ++n) {
            term *= -x2 / n;
            const long double add = term / (2 * n + 1);
            sum += add;
            if (std::fabs(add) < 1e-25L * std::fabs(sum)) break;
        }
        result = 1.0L - two_over_sqrt_pi * sum;
    } else {
        // erfc(ax) = e^{-ax^2}/sqrt(pi) * 1/(ax + (1/2)/(ax + 1/(ax + (3/2)/(ax + ...)))),
        // evaluated by modified Lentz with partial numerators a_n = n/2 and
        // partial denominators ax.
        const long double sqrt_pi = 1.7724538509055160272981674833411L;
        long double f = ax;
        long double c = ax;
        long double d = 0.0L;
        for (int n = 1; n < 400; ++n) {
            const long double a = n * 0.5L;
            d = ax + a * d;
            d = 1.0L / d;
            c = ax + a / c;
            const long double delta = c * d;
            f *= delta;
            if (std::fabs(delta - 1.0L) < 1e-24L) break;
        }
        result = std::exp(-ax * ax) / (sqrt_pi * f);
        if (x < 0.0L) result = 2.0L - result;
    }
    return result;
}

inline long double normal_cdf_ld(long double x) {
    const long double inv_sqrt2 = 0.70710678118654752440084436210485L;
    return 0.5L * erfc_ld(-x * inv_sqrt2);
}

/// Brute-force Kendall tau: Riemann-Stieltjes sum of 4*Int C dC - 1 on an
/// n x n grid, with exact cell masses from cdf rectangle differences and the
/// corner-average standing in for C at the cell midpoint. Uses only cdf
/// evaluations: independent of densities, h-functions and the library's
/// tau integration.
inline double kendall_tau_grid(const copex::CopulaSpec& spec, int n) {
    std::vector<double> prev(n + 1, 0.0), row(n + 1, 0.0);
    double acc = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double u = static_cast<double>(i) / n;
        row[0] = 0.0;
        for (int j = 1; j <= n; ++j) row[j] = copex::cdf(spec, {u, static_cast<double>(j) / n});
        for (int j = 1; j <= n; ++j) {
            const double mass = row[j] - row[j - 1] - prev[j] + prev[j - 1];
            const double cavg = 0.25 * (row[j] + row[j - 1] + prev[j] + prev[j - 1]);
            acc += cavg * mass;
        }
        std::swap(prev, row);
    }
    return 4.0 * acc - 1.0;
}

/// Central cross finite difference of the copula cdf, the density oracle.
inline double density_fd(const copex::CopulaSpec& spec, double u, double v, double h = 3e-5) {
    const double pp = copex::cdf(spec, {u + h, v + h});
    const double pm = copex::cdf(spec, {u + h, v - h});
    const double mp = copex::cdf(spec, {u - h, v + h});
    const double mm = copex::cdf(spec, {u - h, v - h});
    return (pp - pm - mp + mm) / (4.0 * h * h);
}

/// Kolmogorov-Smirnov statistic of a sample against U(0,1).
inline double ks_uniform(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        d = std::max(d, (i + 1) / n - sample[i]);
        d = std::max(d, sample[i] - i / n);
    }
    return d;
}

/// Sup-norm distance between the empirical copula of a sample and the target
/// cdf on the (g+1)x(g+1) grid {0, 1/g, ..., 1}, via a cumulative 2-d
/// histogram (O(n + g^2)).
inline double empirical_copula_supnorm(const std::vector<copex::UnitPoint>& pairs,
                                       const copex::CopulaSpec& spec, int g) {
    std::vector<std::uint32_t> hist((g + 1) * (g + 1), 0);
    for (const copex::UnitPoint& p : pairs) {
        const int i = std::min(g, static_cast<int>(std::floor(p.u * g)) + 1);
        const int j = std::min(g, static_cast<int>(std::floor(p.v * g)) + 1);
        ++hist[i * (g + 1) + j];
    }
    for (int i = 0; i <= g; ++i)
        for (int j = 1; j <= g; ++j) hist[i * (g + 1) + j] += hist[i * (g + 1) + j - 1];
    for (int j = 0; j <= g; ++j)
        for (int i = 1; i <= g; ++i) hist[i * (g + 1) + j] += hist[(i - 1) * (g + 1) + j];
    double worst = 0.0;
    for (int i = 0; i <= g; ++i)
        for (int j = 0; j <= g; ++j) {
            const double emp = static_cast<double>(hist[i * (g + 1) + j]) / pairs.size();
            const double target =
                copex::cdf(spec, {static_cast<double>(i) / g, static_cast<double>(j) / g});
            worst = std::max(worst, std::fabs(emp - target));
        }
    return worst;
}

/// O(n^2) Kendall tau-b, the cross-check for the merge-count implementation.
inline double kendall_tau_quadratic(const std::vector<copex::UnitPoint>& pairs) {
    const std::size_t n = pairs.size();
    long long concordant = 0, discordant = 0, ties_u = 0, ties_v = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double du = pairs[i].u - pairs[j].u;
            const double dv = pairs[i].v - pairs[j].v;
            if (du == 0.0) ++ties_u;
            if (dv == 0.0) ++ties_v;
            if (du == 0.0 || dv == 0.0) continue;
            if (du * dv > 0.0)
                ++concordant;
            else
                ++discordant;
        }
    const double n0 = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    const double denom = std::sqrt((n0 - ties_u) * (n0 - ties_v));
    return denom == 0.0 ? 0.0 : (concordant - discordant) / denom;
}

} // namespace oracle
