// Two-stage copula fitting: parametric pseudo-observations from the fitted
// normal marginals, one-dimensional likelihood search for the densitied
// families, and minimum-distance fitting against the empirical copula for
// the Frechet mixture (which has no density).

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "copex/copula.hpp"
#include "copex/errors.hpp"
#include "copex/normal.hpp"

namespace copex {

struct ReturnRow {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// Aligned log-return pairs (one row per observation date).
struct ReturnPanel {
    std::vector<ReturnRow> rows;
    int horizon_periods = 1; // sampling interval, in periods
};

struct PseudoObservations {
    std::vector<UnitPoint> pairs; // strictly inside the open unit square
};

struct FitResult {
    CopulaSpec spec;
    std::optional<double> loglik;   // absent for Frechet
    std::optional<double> distance; // Frechet only: achieved sum of squares
    int iterations = 0;             // objective evaluations
    bool at_boundary = false;       // optimum pinned at a search bracket edge
};

/// Probability-integral transform of the panel through the fitted marginals:
/// u_k = Phi((x1_k - mu1/ppy) / (sigma1/sqrt(ppy))), clamped into
/// (1e-12, 1-1e-12) so downstream log densities stay finite.
inline PseudoObservations pseudo_observations(const ReturnPanel& panel, const AnnualizedParams& p1,
                                              const AnnualizedParams& p2) {
    if (!(p1.sigma > 0.0) || !(p2.sigma > 0.0))
        raise(Errc::DegenerateSeries, "pseudo_observations: fitted sigma must be > 0");
    const double ppy1 = static_cast<double>(p1.periods_per_year);
    const double ppy2 = static_cast<double>(p2.periods_per_year);
    const double mean1 = p1.mu / ppy1 * panel.horizon_periods;
    const double mean2 = p2.mu / ppy2 * panel.horizon_periods;
    const double sd1 = p1.sigma / std::sqrt(ppy1) * std::sqrt(static_cast<double>(panel.horizon_periods));
    const double sd2 = p2.sigma / std::sqrt(ppy2) * std::sqrt(static_cast<double>(panel.horizon_periods));

    constexpr double eps = 1e-12;
    PseudoObservations obs;
    obs.pairs.reserve(panel.rows.size());
    for (const ReturnRow& row : panel.rows) {
        const double u = std::clamp(std_normal_cdf((row.x1 - mean1) / sd1), eps, 1.0 - eps);
        const double v = std::clamp(std_normal_cdf((row.x2 - mean2) / sd2), eps, 1.0 - eps);
        obs.pairs.push_back({u, v});
    }
    return obs;
}

/// Copula log likelihood at a single parameter value. Families without a
/// density raise NoDensity.
inline double copula_loglik(CopulaFamily family, double param, const PseudoObservations& obs) {
    CopulaSpec spec;
    switch (family) {
        case CopulaFamily::Independence: spec = CopulaSpec::independence(); break;
        case CopulaFamily::Gumbel: spec = CopulaSpec::gumbel(param); break;
        case CopulaFamily::Clayton: spec = CopulaSpec::clayton(param); break;
        case CopulaFamily::Frank: spec = CopulaSpec::frank(param); break;
        case CopulaFamily::Gaussian: spec = CopulaSpec::gaussian(param); break;
        default: raise(Errc::NoDensity, to_string(family) + " has no density; use a distance-based fit");
    }
    validate(spec);
    double sum = 0.0;
    for (const UnitPoint& p : obs.pairs) sum += log_density(spec, p);
    return sum;
}

namespace detail {

// Golden-section maximization on [lo, hi]; terminates when the bracket is
// narrower than xtol. Non-finite objective values are treated as -inf.
struct GoldenResult {
    double x = 0.0;
    double fx = -std::numeric_limits<double>::infinity();
    int evals = 0;
};

template <class F>
GoldenResult golden_section_max(F&& f, double lo, double hi, double xtol) {
    constexpr double inv_phi = 0.6180339887498949;
    const auto safe = [&](double x) {
        const double y = f(x);
        return std::isfinite(y) ? y : -std::numeric_limits<double>::infinity();
    };
    GoldenResult res;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = safe(x1);
    double f2 = safe(x2);
    res.evals = 2;
    while (b - a > xtol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = safe(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = safe(x1);
        }
        ++res.evals;
    }
    if (f1 >= f2) {
        res.x = x1;
        res.fx = f1;
    } else {
        res.x = x2;
        res.fx = f2;
    }
    return res;
}

} // namespace detail

/// One-dimensional maximum likelihood over the family's parameter domain.
/// Brackets: Gumbel [1+1e-6, 50], Clayton [1e-6, 50], Frank [-50,50]\{0}
/// (each sign searched separately, better side kept), Gaussian
/// [-1+1e-6, 1-1e-6]. The search stops once the bracket is below 1e-6.
inline FitResult fit_copula(CopulaFamily family, const PseudoObservations& obs) {
    if (obs.pairs.empty()) raise(Errc::InsufficientData, "fit_copula: no pseudo-observations");
    constexpr double xtol = 1e-6;
    constexpr double cap = 50.0;

    const auto objective = [&](double param) { return copula_loglik(family, param, obs); };

    FitResult fit;
    double lo = 0.0, hi = 0.0;
    detail::GoldenResult best;
    switch (family) {
        case CopulaFamily::Gumbel: {
            lo = 1.0 + 1e-6;
            hi = cap;
            best = detail::golden_section_max(objective, lo, hi, xtol);
            fit.spec = CopulaSpec::gumbel(best.x);
            break;
        }
        case CopulaFamily::Clayton: {
            lo = 1e-6;
            hi = cap;
            best = detail::golden_section_max(objective, lo, hi, xtol);
            fit.spec = CopulaSpec::clayton(best.x);
            break;
        }
        case CopulaFamily::Frank: {
            const auto neg = detail::golden_section_max(objective, -cap, -1e-6, xtol);
            const auto pos = detail::golden_section_max(objective, 1e-6, cap, xtol);
            best = pos.fx >= neg.fx ? pos : neg;
            best.evals = pos.evals + neg.evals;
            lo = -cap;
            hi = cap;
            fit.spec = CopulaSpec::frank(best.x);
            break;
        }
        case CopulaFamily::Gaussian: {
            lo = -1.0 + 1e-6;
            hi = 1.0 - 1e-6;
            best = detail::golden_section_max(objective, lo, hi, xtol);
            fit.spec = CopulaSpec::gaussian(best.x);
            break;
        }
        default:
            raise(Errc::NoDensity, "fit_copula: " + to_string(family) + " requires fit_frechet");
    }
    if (!std::isfinite(best.fx))
        raise(Errc::SearchFailed, "fit_copula: log likelihood non-finite across the whole bracket");
    fit.loglik = best.fx;
    fit.iterations = best.evals;
    fit.at_boundary = std::fabs(best.x - lo) < 10.0 * xtol || std::fabs(best.x - hi) < 10.0 * xtol;
    return fit;
}

/// Empirical copula: fraction of observations weakly below (u,v).
inline double empirical_copula(const PseudoObservations& obs, double u, double v) {
    if (obs.pairs.empty()) raise(Errc::InsufficientData, "empirical_copula: no observations");
    std::size_t count = 0;
    for (const UnitPoint& p : obs.pairs)
        if (p.u <= u && p.v <= v) ++count;
    return static_cast<double>(count) / static_cast<double>(obs.pairs.size());
}

/// Minimum-distance Frechet fit: minimizes the sum of squared deviations
/// between the empirical copula and alpha*M + beta*Pi + gamma*m over the
/// weight simplex, on a 19x19 interior grid; coarse 0.01 sweep in (alpha,
/// gamma) followed by a 1e-4 local refinement.
inline FitResult fit_frechet(const PseudoObservations& obs) {
    if (obs.pairs.empty()) raise(Errc::InsufficientData, "fit_frechet: no observations");

    constexpr int grid_n = 19;
    double emp[grid_n][grid_n];
    double com[grid_n][grid_n], ind[grid_n][grid_n], ctr[grid_n][grid_n];
    for (int i = 0; i < grid_n; ++i) {
        const double u = (i + 1) * 0.05;
        for (int j = 0; j < grid_n; ++j) {
            const double v = (j + 1) * 0.05;
            emp[i][j] = empirical_copula(obs, u, v);
            com[i][j] = std::min(u, v);
            ind[i][j] = u * v;
            ctr[i][j] = std::max(u + v - 1.0, 0.0);
        }
    }

    int evals = 0;
    const auto distance = [&](double alpha, double gamma) {
        const double beta = 1.0 - alpha - gamma;
        double ss = 0.0;
        for (int i = 0; i < grid_n; ++i)
            for (int j = 0; j < grid_n; ++j) {
                const double diff = emp[i][j] - (alpha * com[i][j] + beta * ind[i][j] + gamma * ctr[i][j]);
                ss += diff * diff;
            }
        ++evals;
        return ss;
    };

    double best_a = 0.0, best_g = 0.0;
    double best_ss = std::numeric_limits<double>::infinity();
    const auto consider = [&](double alpha, double gamma) {
        if (alpha < 0.0 || gamma < 0.0 || alpha + gamma > 1.0 + 1e-12) return;
        alpha = std::min(alpha, 1.0);
        gamma = std::min(gamma, 1.0 - alpha);
        const double ss = distance(alpha, gamma);
        if (ss < best_ss) {
            best_ss = ss;
            best_a = alpha;
            best_g = gamma;
        }
    };

    for (int ia = 0; ia <= 100; ++ia)
        for (int ig = 0; ig + ia <= 100; ++ig) consider(ia * 0.01, ig * 0.01);

    const double coarse_a = best_a, coarse_g = best_g;
    for (int ia = -100; ia <= 100; ++ia)
        for (int ig = -100; ig <= 100; ++ig) consider(coarse_a + ia * 1e-4, coarse_g + ig * 1e-4);

    FitResult fit;
    const double beta = std::max(0.0, 1.0 - best_a - best_g);
    fit.spec = CopulaSpec::frechet(best_a, beta, best_g);
    fit.distance = best_ss;
    fit.iterations = evals;
    validate(fit.spec);
    return fit;
}

} // namespace copex
