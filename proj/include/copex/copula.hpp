// Bivariate copula families: joint cdf, density, conditional distribution
// (h-function) and its inverse, survival combination, and Kendall's tau.
//
// All families here are exchangeable (C(u,v) = C(v,u)), so the conditional
// law of U given V reuses the same h-function with the arguments swapped.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "copex/bivariate_normal.hpp"
#include "copex/errors.hpp"
#include "copex/normal.hpp"
#include "copex/quadrature.hpp"

namespace copex {

enum class CopulaFamily {
    Independence,
    Comonotone,
    Countermonotone,
    Frechet,
    Gumbel,
    Clayton,
    Frank,
    Gaussian,
};

inline std::string to_string(CopulaFamily f) {
    switch (f) {
        case CopulaFamily::Independence: return "independence";
        case CopulaFamily::Comonotone: return "comonotone";
        case CopulaFamily::Countermonotone: return "countermonotone";
        case CopulaFamily::Frechet: return "frechet";
        case CopulaFamily::Gumbel: return "gumbel";
        case CopulaFamily::Clayton: return "clayton";
        case CopulaFamily::Frank: return "frank";
        case CopulaFamily::Gaussian: return "gaussian";
    }
    return "?";
}

inline std::optional<CopulaFamily> family_from_string(const std::string& name) {
    if (name == "independence") return CopulaFamily::Independence;
    if (name == "comonotone") return CopulaFamily::Comonotone;
    if (name == "countermonotone") return CopulaFamily::Countermonotone;
    if (name == "frechet") return CopulaFamily::Frechet;
    if (name == "gumbel") return CopulaFamily::Gumbel;
    if (name == "clayton") return CopulaFamily::Clayton;
    if (name == "frank") return CopulaFamily::Frank;
    if (name == "gaussian") return CopulaFamily::Gaussian;
    return std::nullopt;
}

struct FrechetWeights {
    double alpha = 0.0; // comonotone share
    double beta = 0.0;  // independence share
    double gamma = 0.0; // countermonotone share
};

/// Family tag plus its parameters; the single handle every copula operation
/// dispatches on. Use the named constructors.
struct CopulaSpec {
    CopulaFamily family = CopulaFamily::Independence;
    double theta = 0.0;        // Gumbel / Clayton / Frank
    double rho = 0.0;          // Gaussian
    FrechetWeights weights{};  // Frechet

    static CopulaSpec independence() { return {CopulaFamily::Independence, 0.0, 0.0, {}}; }
    static CopulaSpec comonotone() { return {CopulaFamily::Comonotone, 0.0, 0.0, {}}; }
    static CopulaSpec countermonotone() { return {CopulaFamily::Countermonotone, 0.0, 0.0, {}}; }
    static CopulaSpec frechet(double alpha, double beta, double gamma) {
        return {CopulaFamily::Frechet, 0.0, 0.0, {alpha, beta, gamma}};
    }
    static CopulaSpec gumbel(double theta) { return {CopulaFamily::Gumbel, theta, 0.0, {}}; }
    static CopulaSpec clayton(double theta) { return {CopulaFamily::Clayton, theta, 0.0, {}}; }
    static CopulaSpec frank(double theta) { return {CopulaFamily::Frank, theta, 0.0, {}}; }
    static CopulaSpec gaussian(double rho) { return {CopulaFamily::Gaussian, 0.0, rho, {}}; }
};

struct UnitPoint {
    double u = 0.0;
    double v = 0.0;
};

/// Returns a description of the violated constraint, or nullopt if the spec
/// is valid.
inline std::optional<std::string> check(const CopulaSpec& spec) {
    const auto bad = [](double x) { return !std::isfinite(x); };
    switch (spec.family) {
        case CopulaFamily::Independence:
        case CopulaFamily::Comonotone:
        case CopulaFamily::Countermonotone: return std::nullopt;
        case CopulaFamily::Frechet: {
            const auto& w = spec.weights;
            if (bad(w.alpha) || w.alpha < 0.0) return "frechet: alpha >= 0 violated (alpha=" + std::to_string(w.alpha) + ")";
            if (bad(w.beta) || w.beta < 0.0) return "frechet: beta >= 0 violated (beta=" + std::to_string(w.beta) + ")";
            if (bad(w.gamma) || w.gamma < 0.0) return "frechet: gamma >= 0 violated (gamma=" + std::to_string(w.gamma) + ")";
            if (std::fabs(w.alpha + w.beta + w.gamma - 1.0) > 1e-12)
                return "frechet: alpha + beta + gamma = 1 violated (sum=" +
                       std::to_string(w.alpha + w.beta + w.gamma) + ")";
            return std::nullopt;
        }
        case CopulaFamily::Gumbel:
            if (bad(spec.theta) || spec.theta < 1.0)
                return "gumbel: theta >= 1 violated (theta=" + std::to_string(spec.theta) + ")";
            return std::nullopt;
        case CopulaFamily::Clayton:
            if (bad(spec.theta) || !(spec.theta > 0.0))
                return "clayton: theta > 0 violated (theta=" + std::to_string(spec.theta) + ")";
            return std::nullopt;
        case CopulaFamily::Frank:
            if (bad(spec.theta) || spec.theta == 0.0)
                return "frank: theta != 0 violated (theta=" + std::to_string(spec.theta) + ")";
            return std::nullopt;
        case CopulaFamily::Gaussian:
            if (bad(spec.rho) || !(spec.rho > -1.0 && spec.rho < 1.0))
                return "gaussian: -1 < rho < 1 violated (rho=" + std::to_string(spec.rho) + ")";
            return std::nullopt;
    }
    return "unknown family";
}

/// Throws ParamOutOfDomain unless the spec is valid.
inline void validate(const CopulaSpec& spec) {
    if (auto violation = check(spec)) raise(Errc::ParamOutOfDomain, *violation);
}

namespace detail {

// -ln(u), routed through log1p near 1 where plain log loses digits; the
// plain branch keeps tiny u (where u-1 rounds to -1) finite.
inline double neg_log(double u) { return u > 0.5 ? -std::log1p(u - 1.0) : -std::log(u); }

inline void require_unit_square(double u, double v, const char* op) {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
        raise(Errc::ParamOutOfDomain, std::string(op) + ": point outside the unit square (u=" +
                                          std::to_string(u) + ", v=" + std::to_string(v) + ")");
}

// --- Gumbel ---------------------------------------------------------------
// With x = -ln u, y = -ln v and A = (x^t + y^t)^(1/t):  C = exp(-A).

inline double gumbel_a(double x, double y, double theta) {
    const double mx = std::max(x, y);
    const double mn = std::min(x, y);
    if (mx == 0.0) return 0.0;
    return mx * std::exp(std::log1p(std::pow(mn / mx, theta)) / theta);
}

inline double gumbel_cdf(double u, double v, double theta) {
    return std::exp(-gumbel_a(neg_log(u), neg_log(v), theta));
}

// h(v|u) = C * A^(1-theta) * x^(theta-1) / u = exp(x - A + (1-theta) ln(A/x)).
inline double gumbel_hfunc(double u, double v, double theta) {
    const double x = neg_log(u);
    const double y = neg_log(v);
    const double a = gumbel_a(x, y, theta);
    return std::exp(x - a + (1.0 - theta) * std::log(a / x));
}

inline double gumbel_log_density(double u, double v, double theta) {
    const double x = neg_log(u);
    const double y = neg_log(v);
    const double a = gumbel_a(x, y, theta);
    const double la = std::log(a);
    return x + y - a + (theta - 1.0) * (std::log(x) + std::log(y)) + (1.0 - 2.0 * theta) * la +
           std::log(a + theta - 1.0);
}

// --- Clayton ---------------------------------------------------------------
// T = u^-t + v^-t - 1, computed in log space:
// ln T = m + log1p(exp(-m) * expm1(mn)) with m = max(tx,ty), mn = min.

inline double clayton_log_t(double u, double v, double theta) {
    const double a = theta * neg_log(u);
    const double b = theta * neg_log(v);
    const double m = std::max(a, b);
    const double mn = std::min(a, b);
    // ln(e^a + e^b - 1) = m + ln(1 + e^-m expm1(mn)); the second form keeps
    // the product finite once expm1 would overflow.
    if (mn < 700.0) return m + std::log1p(std::exp(-m) * std::expm1(mn));
    return m + std::log1p(std::exp(mn - m) - std::exp(-m));
}

inline double clayton_cdf(double u, double v, double theta) {
    return std::exp(-clayton_log_t(u, v, theta) / theta);
}

// h(v|u) = (1 + u^t (v^-t - 1))^(-(t+1)/t) = exp(-(t+1)/t * (lnT - t x)).
inline double clayton_hfunc(double u, double v, double theta) {
    const double lw = clayton_log_t(u, v, theta) - theta * neg_log(u);
    return std::exp(-(theta + 1.0) / theta * lw);
}

inline double clayton_quantile(double u, double w, double theta) {
    // v = [ (w^(-t/(t+1)) - 1) u^-t + 1 ]^(-1/t), assembled in log space so
    // theta near its 50 cap cannot overflow.
    const double c0 = -theta / (theta + 1.0) * std::log(w); // > 0 for w in (0,1)
    const double q = std::expm1(c0);
    const double l = std::log(q) + theta * neg_log(u);
    const double ln_g = l > 0.0 ? l + std::log1p(std::exp(-l)) : std::log1p(std::exp(l));
    return std::exp(-ln_g / theta);
}

inline double clayton_log_density(double u, double v, double theta) {
    return std::log1p(theta) + (theta + 1.0) * (neg_log(u) + neg_log(v)) -
           (2.0 + 1.0 / theta) * clayton_log_t(u, v, theta);
}

// --- Frank ------------------------------------------------------------------

// Forward declaration: the regrouped h-function denominator below equals
// 1 + gu*gv/d exactly, which the strong-dependence cdf branch reuses.
inline double frank_h_denominator(double u, double v, double theta);

inline double frank_cdf(double u, double v, double theta) {
    const double d = std::expm1(-theta);
    const double gu = std::expm1(-theta * u);
    const double gv = std::expm1(-theta * v);
    const double q = gu * gv / d;
    // Away from q -> -1 the direct form is exact. Once gu*gv/d approaches -1
    // (large positive theta toward the upper corner) 1+q cancels below
    // round-off, so evaluate it through the regrouped identity
    // 1 + gu*gv/d = frank_h_denominator / d, whose terms share a sign.
    if (q > -0.5) return -std::log1p(q) / theta;
    const double n = frank_h_denominator(u, v, theta);
    return -(std::log(std::fabs(n)) - std::log(std::fabs(d))) / theta;
}

// The h-function denominator expm1(-t)+gu*gv cancels badly near (1,1);
// regrouped as e^{-tu} gv - (e^{-tv} - e^{-t}) both contributions carry the
// same sign for every theta, and the second factors through expm1 exactly.
inline double frank_h_denominator(double u, double v, double theta) {
    return std::exp(-theta * u) * std::expm1(-theta * v) -
           std::exp(-theta) * std::expm1(theta * (1.0 - v));
}

inline double frank_hfunc(double u, double v, double theta) {
    const double numer = std::exp(-theta * u) * std::expm1(-theta * v);
    return numer / frank_h_denominator(u, v, theta);
}

inline double frank_quantile(double u, double w, double theta) {
    // 1 + w*expm1(-theta)/(w + (1-w)e^{-theta u}) rearranged into a ratio of
    // strictly positive sums, so no cancellation for any theta.
    const double eu = std::exp(-theta * u);
    const double numer = w * std::exp(-theta) + (1.0 - w) * eu;
    const double denom = w + (1.0 - w) * eu;
    return -std::log(numer / denom) / theta;
}

inline double frank_log_density(double u, double v, double theta) {
    const double d = std::expm1(-theta);
    const double denom = frank_h_denominator(u, v, theta);
    return std::log(-theta * d) - theta * (u + v) - 2.0 * std::log(std::fabs(denom));
}

// --- Gaussian ----------------------------------------------------------------

inline double gaussian_cdf(double u, double v, double rho) {
    return bivariate_normal_cdf(std_normal_quantile(u), std_normal_quantile(v), rho);
}

inline double gaussian_hfunc(double u, double v, double rho) {
    const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
    return std_normal_cdf((std_normal_quantile(v) - rho * std_normal_quantile(u)) / s);
}

inline double gaussian_quantile(double u, double w, double rho) {
    const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
    return std_normal_cdf(rho * std_normal_quantile(u) + s * std_normal_quantile(w));
}

inline double gaussian_log_density(double u, double v, double rho) {
    const double x = std_normal_quantile(u);
    const double y = std_normal_quantile(v);
    const double s2 = (1.0 - rho) * (1.0 + rho);
    return -0.5 * std::log(s2) - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * s2);
}

// --- Frechet mixture ---------------------------------------------------------

inline double frechet_cdf(double u, double v, const FrechetWeights& w) {
    return w.alpha * std::min(u, v) + w.beta * u * v + w.gamma * std::max(u + v - 1.0, 0.0);
}

// Mixture conditional: alpha 1{v >= u} + beta v + gamma 1{v >= 1-u}.
inline double frechet_hfunc(double u, double v, const FrechetWeights& w) {
    double h = w.beta * v;
    if (v >= u) h += w.alpha;
    if (v >= 1.0 - u) h += w.gamma;
    return h;
}

// Generalized inverse: smallest v with h(v|u) >= w. The point masses sit at
// u and 1-u; when u == 0.5 they coincide and merge into one jump.
inline double frechet_quantile(double u, double w, const FrechetWeights& wt) {
    double t1 = std::min(u, 1.0 - u);
    double t2 = std::max(u, 1.0 - u);
    double j1 = u <= 1.0 - u ? wt.alpha : wt.gamma;
    double j2 = u <= 1.0 - u ? wt.gamma : wt.alpha;
    if (t1 == t2) {
        j1 = wt.alpha + wt.gamma;
        j2 = 0.0;
    }
    const double b = wt.beta;
    if (b > 0.0 && w <= b * t1) return w / b;
    if (w <= b * t1 + j1) return t1;
    if (b > 0.0 && w <= b * t2 + j1) return (w - j1) / b;
    if (w <= b * t2 + j1 + j2) return t2;
    if (b > 0.0) return std::min(1.0, (w - j1 - j2) / b);
    return t2; // pure mixture of point masses; w < 1 always lands by t2
}

} // namespace detail

/// Joint cdf C(u,v). Boundary values are exact: C(u,1) = u, C(1,v) = v,
/// C(u,0) = C(0,v) = 0.
inline double cdf(const CopulaSpec& spec, UnitPoint p) {
    validate(spec);
    detail::require_unit_square(p.u, p.v, "cdf");
    const double u = p.u;
    const double v = p.v;
    if (u <= 0.0 || v <= 0.0) return 0.0;
    if (u >= 1.0) return v;
    if (v >= 1.0) return u;

    double c = 0.0;
    switch (spec.family) {
        case CopulaFamily::Independence: c = u * v; break;
        case CopulaFamily::Comonotone: c = std::min(u, v); break;
        case CopulaFamily::Countermonotone: c = std::max(u + v - 1.0, 0.0); break;
        case CopulaFamily::Frechet: c = detail::frechet_cdf(u, v, spec.weights); break;
        case CopulaFamily::Gumbel: c = detail::gumbel_cdf(u, v, spec.theta); break;
        case CopulaFamily::Clayton: c = detail::clayton_cdf(u, v, spec.theta); break;
        case CopulaFamily::Frank: c = detail::frank_cdf(u, v, spec.theta); break;
        case CopulaFamily::Gaussian: c = detail::gaussian_cdf(u, v, spec.rho); break;
    }
    return std::clamp(c, 0.0, 1.0);
}

/// Copula density c(u,v) = d2C/dudv on the open unit square. Families with
/// singular components (Comonotone, Countermonotone, Frechet) have none and
/// raise NoDensity: callers must fall back to a non-likelihood fit.
inline double log_density(const CopulaSpec& spec, UnitPoint p) {
    validate(spec);
    if (!(p.u > 0.0 && p.u < 1.0 && p.v > 0.0 && p.v < 1.0))
        raise(Errc::ParamOutOfDomain, "density: point must lie strictly inside the unit square");
    switch (spec.family) {
        case CopulaFamily::Independence: return 0.0;
        case CopulaFamily::Gumbel: return detail::gumbel_log_density(p.u, p.v, spec.theta);
        case CopulaFamily::Clayton: return detail::clayton_log_density(p.u, p.v, spec.theta);
        case CopulaFamily::Frank: return detail::frank_log_density(p.u, p.v, spec.theta);
        case CopulaFamily::Gaussian: return detail::gaussian_log_density(p.u, p.v, spec.rho);
        default:
            raise(Errc::NoDensity,
                  to_string(spec.family) + " has singular components and no density");
    }
}

inline double density(const CopulaSpec& spec, UnitPoint p) { return std::exp(log_density(spec, p)); }

inline bool has_density(CopulaFamily family) {
    switch (family) {
        case CopulaFamily::Comonotone:
        case CopulaFamily::Countermonotone:
        case CopulaFamily::Frechet: return false;
        default: return true;
    }
}

/// h-function: P(V <= v | U = u) = dC(u,v)/du. Undefined at u = 0 or 1.
inline double conditional_cdf(const CopulaSpec& spec, double u, double v) {
    validate(spec);
    if (!(u > 0.0 && u < 1.0))
        raise(Errc::ConditionalUndefined, "conditional_cdf: conditioning value u=" + std::to_string(u));
    detail::require_unit_square(u, v, "conditional_cdf");
    // Every family places no conditional mass at v=0 and all of it by v=1
    // (the mixture jumps sit strictly inside when 0 < u < 1).
    if (v <= 0.0) return 0.0;
    if (v >= 1.0) return 1.0;

    double h = 0.0;
    switch (spec.family) {
        case CopulaFamily::Independence: h = v; break;
        case CopulaFamily::Comonotone: h = v >= u ? 1.0 : 0.0; break;
        case CopulaFamily::Countermonotone: h = v >= 1.0 - u ? 1.0 : 0.0; break;
        case CopulaFamily::Frechet: h = detail::frechet_hfunc(u, v, spec.weights); break;
        case CopulaFamily::Gumbel: h = detail::gumbel_hfunc(u, v, spec.theta); break;
        case CopulaFamily::Clayton: h = detail::clayton_hfunc(u, v, spec.theta); break;
        case CopulaFamily::Frank: h = detail::frank_hfunc(u, v, spec.theta); break;
        case CopulaFamily::Gaussian: h = detail::gaussian_hfunc(u, v, spec.rho); break;
    }
    return std::clamp(h, 0.0, 1.0);
}

namespace detail {

// Safeguarded Newton/bisection inversion of the Gumbel h-function in v.
// h is monotone increasing with derivative c(u,v); bisection keeps the
// bracket valid where Newton would overshoot near the corners. The h and
// density evaluations share x^theta and the A = (x^t + y^t)^(1/t) pieces,
// since this runs once per Gibbs draw.
inline double gumbel_quantile(double u, double w, double theta) {
    constexpr double lo_edge = 1e-15;
    constexpr double hi_edge = 1.0 - 1e-15;
    double lo = lo_edge;
    double hi = hi_edge;
    // The clamped box truncates the extreme tails: if even the edge cannot
    // reach w, the generalized inverse saturates at the edge.
    if (gumbel_hfunc(u, hi, theta) <= w) return hi;
    if (gumbel_hfunc(u, lo, theta) >= w) return lo;

    const double x = neg_log(u);
    const double lx = std::log(x);

    // One pass computes ln h and ln c from the shared A terms.
    const auto eval = [&](double v, double& log_h, double& log_c) {
        const double y = neg_log(v);
        const double ly = std::log(y);
        double la; // ln A
        if (y <= x)
            la = lx + std::log1p(std::exp(theta * (ly - lx))) / theta;
        else
            la = ly + std::log1p(std::exp(theta * (lx - ly))) / theta;
        const double a = std::exp(la);
        log_h = x - a + (1.0 - theta) * (la - lx);
        log_c = x + y - a + (theta - 1.0) * (lx + ly) + (1.0 - 2.0 * theta) * la +
                std::log(a + theta - 1.0);
    };

    // The conditional median sits near v = u for every theta (h(u|u) is
    // 2^(1/theta - 1)), which makes u a far better start than 0.5.
    double v = std::clamp(u, 1e-6, 1.0 - 1e-6);
    for (int iter = 0; iter < 200; ++iter) {
        double log_h, log_c;
        eval(v, log_h, log_c);
        const double f = std::exp(log_h) - w;
        // Residual stop keeps h(v)-w below 1e-11 even where the density (the
        // derivative of h) is large and a 1e-12 bracket alone would not.
        if (std::fabs(f) < 1e-11 && hi - lo < 1e-9) break;
        if (f > 0.0)
            hi = v;
        else
            lo = v;
        if (hi - lo < 1e-15) break;
        double next = v - f / std::exp(log_c);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        v = next;
    }
    if (!(v >= lo_edge && v <= hi_edge))
        raise(Errc::RootNotBracketed, "gumbel_quantile: inversion left the unit interval");
    return std::clamp(v, lo, hi);
}

} // namespace detail

/// Conditional quantile v = h^{-1}(w | u): the smallest v with
/// conditional_cdf(spec,u,v) >= w. Closed forms everywhere except Gumbel,
/// which is inverted numerically to 1e-12 in v.
inline double conditional_quantile(const CopulaSpec& spec, double u, double w) {
    validate(spec);
    if (!(u > 0.0 && u < 1.0))
        raise(Errc::ConditionalUndefined, "conditional_quantile: conditioning value u=" + std::to_string(u));
    if (!(w > 0.0 && w < 1.0))
        raise(Errc::QuantileDomain, "conditional_quantile: w must lie strictly in (0,1), got " + std::to_string(w));

    double v = 0.0;
    switch (spec.family) {
        case CopulaFamily::Independence: v = w; break;
        case CopulaFamily::Comonotone: v = u; break;
        case CopulaFamily::Countermonotone: v = 1.0 - u; break;
        case CopulaFamily::Frechet: v = detail::frechet_quantile(u, w, spec.weights); break;
        case CopulaFamily::Gumbel: return detail::gumbel_quantile(u, w, spec.theta);
        case CopulaFamily::Clayton: v = detail::clayton_quantile(u, w, spec.theta); break;
        case CopulaFamily::Frank: v = detail::frank_quantile(u, w, spec.theta); break;
        case CopulaFamily::Gaussian: v = detail::gaussian_quantile(u, w, spec.rho); break;
    }
    return std::clamp(v, 0.0, 1.0);
}

/// Joint survival through the reflection identity
/// P(U > u, V > v) = 1 - u - v + C(u,v), clamped against round-off
/// undershoot; anything below -1e-12 is a logic error, not round-off.
inline double survival_value(const CopulaSpec& spec, double u, double v) {
    const double s = 1.0 - u - v + cdf(spec, {u, v});
    if (s < -1e-12)
        raise(Errc::InternalError, "survival_value: " + std::to_string(s) + " below the -1e-12 round-off guard");
    return std::clamp(s, 0.0, 1.0);
}

/// Kendall's tau of the copula. Mixture/degenerate families are analytic;
/// continuous families integrate tau = 1 - 4 * I[dC/du * dC/dv] by a
/// panel-doubling tensor Gauss-Legendre rule (absolute error <= 1e-4).
inline double theoretical_kendall_tau(const CopulaSpec& spec) {
    validate(spec);
    switch (spec.family) {
        case CopulaFamily::Independence: return 0.0;
        case CopulaFamily::Comonotone: return 1.0;
        case CopulaFamily::Countermonotone: return -1.0;
        case CopulaFamily::Frechet: {
            const auto& w = spec.weights;
            return (w.alpha - w.gamma) * (w.alpha + w.gamma + 2.0) / 3.0;
        }
        default: break;
    }
    const auto integrand = [&](double u, double v) {
        return conditional_cdf(spec, u, v) * conditional_cdf(spec, v, u);
    };
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int panels = 4; panels <= 128; panels *= 2) {
        const double tau = 1.0 - 4.0 * integrate_unit_square(integrand, panels);
        if (std::isfinite(prev) && std::fabs(tau - prev) < 2.5e-5) return tau;
        prev = tau;
    }
    return prev;
}

} // namespace copex
