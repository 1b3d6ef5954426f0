// Exchange-option pricing: Margrabe closed form under GBM, Gibbs-MCMC under
// any copula, and survival-copula quadrature.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "copex/copula.hpp"
#include "copex/errors.hpp"
#include "copex/gibbs.hpp"
#include "copex/normal.hpp"
#include "copex/quadrature.hpp"

namespace copex {

/// Pricing inputs: spot prices, risk-free rate and time to expiry in years.
struct MarketState {
    double s1 = 0.0; // > 0
    double s2 = 0.0; // >= 0
    double r = 0.0;  // per year
    double tau = 0.0; // years, >= 0
};

enum class PriceMethod { Margrabe, Mcmc, Quadrature };

inline std::string to_string(PriceMethod m) {
    switch (m) {
        case PriceMethod::Margrabe: return "margrabe";
        case PriceMethod::Mcmc: return "mcmc";
        case PriceMethod::Quadrature: return "quadrature";
    }
    return "?";
}

struct PriceResult {
    double value = 0.0;
    /// Monte Carlo only; the i.i.d. formula on a dependent chain, i.e. a
    /// dependence-ignoring lower bound ("naive"). 0 for deterministic methods.
    double std_error = 0.0;
    PriceMethod method = PriceMethod::Margrabe;
    /// MCMC: kept samples; Quadrature: integrand evaluations; Margrabe: 0.
    std::int64_t n_effective = 0;
};

struct QuadratureSettings {
    int initial_panels = 8;    // log-spaced panels on the first pass
    int max_doublings = 12;    // TruncationNotConverged beyond this
    double tolerance = 1e-6;   // absolute target, as a fraction of S1
};

namespace detail {
inline void require_market(const MarketState& st, const char* op) {
    if (!(st.s1 > 0.0)) raise(Errc::ParamOutOfDomain, std::string(op) + ": s1 must be > 0");
    if (!(st.s2 >= 0.0)) raise(Errc::ParamOutOfDomain, std::string(op) + ": s2 must be >= 0");
    if (!(st.tau >= 0.0)) raise(Errc::ParamOutOfDomain, std::string(op) + ": tau must be >= 0");
}
} // namespace detail

/// Terminal payoff of the exchange option.
inline double payoff(double s1_terminal, double s2_terminal) {
    return std::max(s1_terminal - s2_terminal, 0.0);
}

/// Closed-form exchange option price under two correlated GBMs:
/// S1 N(d1) - S2 N(d2) with the combined variance sigma1^2 + sigma2^2
/// - 2 rho sigma1 sigma2. Degenerate inputs (tau = 0, zero combined
/// variance, s2 = 0) collapse to their deterministic values.
inline PriceResult margrabe_price(const MarketState& state, double sigma1, double sigma2, double rho) {
    detail::require_market(state, "margrabe_price");
    if (!(sigma1 > 0.0)) raise(Errc::ParamOutOfDomain, "margrabe_price: sigma1 must be > 0");
    if (!(sigma2 >= 0.0)) raise(Errc::ParamOutOfDomain, "margrabe_price: sigma2 must be >= 0");
    if (!(rho >= -1.0 && rho <= 1.0)) raise(Errc::ParamOutOfDomain, "margrabe_price: rho must be in [-1,1]");

    PriceResult res;
    res.method = PriceMethod::Margrabe;
    if (state.s2 == 0.0) {
        res.value = state.s1;
        return res;
    }
    if (state.tau == 0.0) {
        res.value = payoff(state.s1, state.s2);
        return res;
    }
    const double var = sigma1 * sigma1 + sigma2 * sigma2 - 2.0 * rho * sigma1 * sigma2;
    if (var < -1e-15) raise(Errc::NegativeVariance, "margrabe_price: combined variance " + std::to_string(var));
    const double v = std::sqrt(std::max(var, 0.0));
    const double vsqrt = v * std::sqrt(state.tau);
    if (vsqrt == 0.0) {
        // The price ratio is deterministic: value of exchanging S2 for S1 now.
        res.value = payoff(state.s1, state.s2);
        return res;
    }
    const double d1 = (std::log(state.s1 / state.s2) + 0.5 * vsqrt * vsqrt) / vsqrt;
    const double d2 = d1 - vsqrt;
    res.value = state.s1 * std_normal_cdf(d1) - state.s2 * std_normal_cdf(d2);
    return res;
}

/// MCMC price: runs the Gibbs chain for the copula, maps the kept pairs
/// through the marginal quantile transforms, and averages the discounted
/// payoff. Deterministic for a fixed config.seed.
inline PriceResult mcmc_price(const MarketState& state, const CopulaSpec& spec, const NormalMarginal& m1,
                              const NormalMarginal& m2, const ChainConfig& config) {
    detail::require_market(state, "mcmc_price");
    if (!(state.tau > 0.0)) raise(Errc::ParamOutOfDomain, "mcmc_price: tau must be > 0");
    if (!(m1.sd > 0.0) || !(m2.sd > 0.0)) raise(Errc::DegenerateSeries, "mcmc_price: marginal sd must be > 0");

    const ChainOutput chain = run_chain(spec, config);
    const double discount = std::exp(-state.r * state.tau);
    const std::size_t n = chain.pairs.size();

    double sum = 0.0, sum_sq = 0.0;
    for (const UnitPoint& p : chain.pairs) {
        const double s1t = state.s1 * std::exp(quantile_transform(m1, p.u));
        const double s2t = state.s2 == 0.0 ? 0.0 : state.s2 * std::exp(quantile_transform(m2, p.v));
        const double pay = payoff(s1t, s2t);
        sum += pay;
        sum_sq += pay * pay;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, (sum_sq - sum * mean) / std::max<double>(1.0, static_cast<double>(n - 1)));

    PriceResult res;
    res.method = PriceMethod::Mcmc;
    res.value = discount * mean;
    res.std_error = discount * std::sqrt(var / static_cast<double>(n));
    res.n_effective = static_cast<std::int64_t>(n);
    return res;
}

/// Survival-copula quadrature price:
/// V = S1 - e^{-r tau} Int_0^inf [1 - u(z) - v(z) + C(u(z),v(z))] dz with
/// u(z) = F1(ln(z/S1)), v(z) = F2(ln(z/S2)). The semi-infinite integral is
/// truncated at the 1-1e-10 lognormal quantile and evaluated by composite
/// 16-point Gauss-Legendre on a log-spaced partition, doubling the panel
/// count until two passes agree to tolerance * S1.
inline PriceResult quadrature_price(const MarketState& state, const CopulaSpec& spec, const NormalMarginal& m1,
                                    const NormalMarginal& m2, const QuadratureSettings& settings = {}) {
    detail::require_market(state, "quadrature_price");
    if (!(state.tau > 0.0)) raise(Errc::ParamOutOfDomain, "quadrature_price: tau must be > 0");
    if (!(state.s2 > 0.0))
        raise(Errc::ParamOutOfDomain, "quadrature_price: s2 must be > 0 (the z-substitution needs both marginals)");
    if (!(m1.sd > 0.0) || !(m2.sd > 0.0)) raise(Errc::DegenerateSeries, "quadrature_price: marginal sd must be > 0");
    validate(spec);

    const double q_hi = std_normal_quantile(1.0 - 1e-10);
    const double q_lo = -q_hi;
    const double z_max = std::max(state.s1 * std::exp(m1.mean + m1.sd * q_hi),
                                  state.s2 * std::exp(m2.mean + m2.sd * q_hi));
    const double z_lo = std::min(state.s1 * std::exp(m1.mean + m1.sd * q_lo),
                                 state.s2 * std::exp(m2.mean + m2.sd * q_lo));

    std::int64_t evals = 0;
    const auto integrand = [&](double z) {
        ++evals;
        const double u = std_normal_cdf((std::log(z / state.s1) - m1.mean) / m1.sd);
        const double v = std_normal_cdf((std::log(z / state.s2) - m2.mean) / m2.sd);
        return survival_value(spec, u, v);
    };

    const double tol = settings.tolerance * state.s1;
    const double log_lo = std::log(z_lo);
    const double log_hi = std::log(z_max);

    double prev = std::numeric_limits<double>::quiet_NaN();
    int panels = std::max(settings.initial_panels, 1);
    for (int pass = 0; pass <= settings.max_doublings; ++pass, panels *= 2) {
        std::vector<double> breaks;
        breaks.reserve(static_cast<std::size_t>(panels) + 2);
        breaks.push_back(0.0); // [0, z_lo]: survival there is 1 - O(1e-10)
        for (int i = 0; i <= panels; ++i)
            breaks.push_back(std::exp(log_lo + (log_hi - log_lo) * i / panels));
        const double integral = integrate_panels(integrand, breaks);
        if (!std::isfinite(integral))
            raise(Errc::InternalError, "quadrature_price: non-finite integrand encountered");
        if (std::isfinite(prev) && std::fabs(integral - prev) <= tol) {
            PriceResult res;
            res.method = PriceMethod::Quadrature;
            res.value = state.s1 - std::exp(-state.r * state.tau) * integral;
            res.n_effective = evals;
            if (res.value < 0.0) {
                // A true value of 0 can land below 0 by up to the quadrature
                // tolerance; anything clearly beyond that is a logic error.
                if (res.value < -10.0 * tol)
                    raise(Errc::InternalError,
                          "quadrature_price: negative value " + std::to_string(res.value));
                res.value = 0.0;
            }
            return res;
        }
        prev = integral;
    }
    raise(Errc::TruncationNotConverged,
          "quadrature_price: no convergence after " + std::to_string(settings.max_doublings) + " doublings");
}

} // namespace copex
