// Standard-normal special functions and the normal log-return marginal.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "copex/errors.hpp"

namespace copex {

inline constexpr double inv_sqrt_2 = 0.70710678118654752440;
inline constexpr double inv_sqrt_2pi = 0.39894228040143267794;

inline double std_normal_pdf(double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); }

/// Standard normal cdf via the complementary error function; absolute error
/// well below 1e-15 over the whole real line.
inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * inv_sqrt_2); }

/// Standard normal quantile, algorithm AS 241 (Wichura, 1988), the PPND16
/// variant: relative error about 1e-16 for p in (1e-300, 1).
inline double std_normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        raise(Errc::QuantileDomain, "std_normal_quantile: p must lie strictly in (0,1), got " + std::to_string(p));

    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
                    4.5921953931549871457e+4) *
                       r +
                   1.3731693765509461125e+4) *
                      r +
                  1.9715909503065514427e+3) *
                     r +
                 1.3314166789178437745e+2) *
                    r +
                3.3871328727963666080e0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
                    2.1213794301586595867e+4) *
                       r +
                   5.3941960214247511077e+3) *
                      r +
                  6.8718700749205790830e+2) *
                     r +
                 4.2313330701600911252e+1) *
                    r +
                1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double ret;
    if (r <= 5.0) {
        r -= 1.6;
        ret = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                   1.27045825245236838258e0) *
                      r +
                  3.64784832476320460504e0) *
                     r +
                 5.76949722146069140550e0) *
                    r +
                4.63033784615654529590e0) *
                   r +
               1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                   1.48103976427480074590e-1) *
                      r +
                  6.89767334985100004550e-1) *
                     r +
                 1.67638483018380384940e0) *
                    r +
                2.05319162663775882187e0) *
                   r +
               1.0);
    } else {
        r -= 5.0;
        ret = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                   2.65321895265761230930e-2) *
                      r +
                  2.96560571828504891230e-1) *
                     r +
                 1.78482653991729133580e0) *
                    r +
                5.46378491116411436990e0) *
                   r +
               6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                   7.86869131145613259100e-4) *
                      r +
                  1.48753612908506148525e-2) *
                     r +
                 1.36929880922735805310e-1) *
                    r +
                5.99832206555887937690e-1) *
                   r +
               1.0);
    }
    return q < 0.0 ? -ret : ret;
}

// --- Marginal model -------------------------------------------------------

/// Per-horizon log-return law of one asset: X ~ N(mean, sd^2).
struct NormalMarginal {
    double mean = 0.0;
    double sd = 0.0; // must be > 0
};

/// Annualized drift/volatility estimates plus the sampling convention that
/// produced them.
struct AnnualizedParams {
    double mu = 0.0;    // per year
    double sigma = 0.0; // per sqrt(year)
    int periods_per_year = 252;
};

/// How the risk-neutral per-horizon mean is formed. PaperLiteral sets it to
/// r*tau; Martingale applies the lognormal convexity correction so that
/// E[e^X] = e^(r*tau) holds exactly.
enum class DriftMode { PaperLiteral, Martingale };

inline std::string to_string(DriftMode mode) {
    return mode == DriftMode::Martingale ? "martingale" : "paper";
}

inline NormalMarginal risk_neutral_marginal(double r, double sigma_annual, double tau, DriftMode mode) {
    if (!(sigma_annual > 0.0))
        raise(Errc::ParamOutOfDomain, "risk_neutral_marginal: sigma must be > 0, got " + std::to_string(sigma_annual));
    if (!(tau > 0.0))
        raise(Errc::ParamOutOfDomain, "risk_neutral_marginal: tau must be > 0, got " + std::to_string(tau));
    const double mean = mode == DriftMode::Martingale ? (r - 0.5 * sigma_annual * sigma_annual) * tau : r * tau;
    return NormalMarginal{mean, sigma_annual * std::sqrt(tau)};
}

/// Maps a uniform draw through the marginal quantile function.
inline double quantile_transform(const NormalMarginal& marginal, double u) {
    return marginal.mean + marginal.sd * std_normal_quantile(u);
}

/// Closed-form Gaussian MLE of one return series, annualized. The variance
/// uses the 1/n normalization (the likelihood maximizer, not the unbiased
/// 1/(n-1) estimator); the difference is recorded in the diagnostics fields.
struct MarginalFit {
    AnnualizedParams params;
    std::size_t n = 0;
    double sample_mean = 0.0; // per period
    double sample_sd = 0.0;   // per period, 1/n normalization
    bool degenerate = false;  // zero sample variance
};

inline MarginalFit fit_marginal(std::span<const double> log_returns, int periods_per_year) {
    if (log_returns.size() < 2)
        raise(Errc::InsufficientData, "fit_marginal: needs at least 2 observations, got " +
                                          std::to_string(log_returns.size()));
    if (periods_per_year < 1)
        raise(Errc::ParamOutOfDomain, "fit_marginal: periods_per_year must be >= 1");

    const double n = static_cast<double>(log_returns.size());
    double mean = 0.0;
    bool constant = true;
    for (double x : log_returns) {
        mean += x;
        constant = constant && x == log_returns[0];
    }
    mean /= n;
    double var = 0.0;
    for (double x : log_returns) var += (x - mean) * (x - mean);
    var /= n;
    // An exactly constant series must report sd 0 rather than the summation
    // round-off of the mean.
    const double sd = constant ? 0.0 : std::sqrt(var);

    MarginalFit fit;
    fit.n = log_returns.size();
    fit.sample_mean = mean;
    fit.sample_sd = sd;
    fit.degenerate = !(sd > 0.0);
    fit.params.mu = mean * periods_per_year;
    fit.params.sigma = sd * std::sqrt(static_cast<double>(periods_per_year));
    fit.params.periods_per_year = periods_per_year;
    return fit;
}

} // namespace copex
