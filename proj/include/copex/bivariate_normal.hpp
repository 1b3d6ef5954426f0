// Bivariate standard normal probabilities.
//
// Port of Alan Genz's BVND (the Drezner & Wesolowsky (1990) scheme with
// Genz's refinements, as published in his MATLAB bvn.m / Fortran TVPACK).
// Absolute accuracy is about 5e-16, far inside the 1e-10 the pricing
// quadrature requires per evaluation.

#pragma once

#include <algorithm>
#include <cmath>

#include "copex/normal.hpp"

namespace copex {

namespace detail {

// Gauss-Legendre half-rules used by BVND, selected on |r|.
inline constexpr double bvn_w6[3] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
inline constexpr double bvn_x6[3] = {0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
inline constexpr double bvn_w12[6] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                                      0.2031674267230659,  0.2334925365383547, 0.2491470458134029};
inline constexpr double bvn_x12[6] = {0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                                      0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
inline constexpr double bvn_w20[10] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                                       0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                                       0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                                       0.1527533871307259};
inline constexpr double bvn_x20[10] = {0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                                       0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                                       0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                                       0.0765265211334973};

} // namespace detail

/// Upper-quadrant probability P(X > dh, Y > dk) for standard bivariate
/// normal (X,Y) with correlation r.
inline double bivariate_normal_survival(double dh, double dk, double r) {
    constexpr double two_pi = 6.283185307179586476925286766559;

    if (std::isinf(dh) && dh > 0) return 0.0;
    if (std::isinf(dk) && dk > 0) return 0.0;
    if (std::isinf(dh)) return std::isinf(dk) ? 1.0 : std_normal_cdf(-dk);
    if (std::isinf(dk)) return std_normal_cdf(-dh);
    if (r == 0.0) return std_normal_cdf(-dh) * std_normal_cdf(-dk);

    const double* w;
    const double* x;
    int ng;
    const double ar = std::fabs(r);
    if (ar < 0.3) {
        w = detail::bvn_w6;
        x = detail::bvn_x6;
        ng = 3;
    } else if (ar < 0.75) {
        w = detail::bvn_w12;
        x = detail::bvn_x12;
        ng = 6;
    } else {
        w = detail::bvn_w20;
        x = detail::bvn_x20;
        ng = 10;
    }

    double h = dh;
    double k = dk;
    double hk = h * k;
    double bvn = 0.0;

    if (ar < 0.925) {
        const double hs = 0.5 * (h * h + k * k);
        const double asr = 0.5 * std::asin(r);
        for (int i = 0; i < ng; ++i) {
            for (int is = -1; is <= 1; is += 2) {
                const double sn = std::sin(asr * (1.0 + is * x[i]));
                bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        bvn = bvn * asr / two_pi + std_normal_cdf(-h) * std_normal_cdf(-k);
    } else {
        if (r < 0.0) {
            k = -k;
            hk = -hk;
        }
        if (ar < 1.0) {
            const double as = (1.0 - r) * (1.0 + r);
            double a = std::sqrt(as);
            const double bs = (h - k) * (h - k);
            const double c = (4.0 - hk) / 8.0;
            const double d = (12.0 - hk) / 80.0;
            const double asr0 = -0.5 * (bs / as + hk);
            if (asr0 > -100.0)
                bvn = a * std::exp(asr0) * (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
            if (hk > -100.0) {
                const double b = std::sqrt(bs);
                const double sp = std::sqrt(two_pi) * std_normal_cdf(-b / a);
                bvn -= std::exp(-0.5 * hk) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
            }
            a *= 0.5;
            for (int i = 0; i < ng; ++i) {
                for (int is = -1; is <= 1; is += 2) {
                    const double xs = std::pow(a * (1.0 + is * x[i]), 2);
                    const double rs = std::sqrt(1.0 - xs);
                    const double asr = -0.5 * (bs / xs + hk);
                    if (asr > -100.0) {
                        const double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
                        const double ep = std::exp(-0.5 * hk * (1.0 - rs) / (1.0 + rs)) / rs;
                        bvn += a * w[i] * std::exp(asr) * (ep - sp);
                    }
                }
            }
            bvn = -bvn / two_pi;
        }
        if (r > 0.0) {
            bvn += std_normal_cdf(-std::max(h, k));
        } else if (h >= k) {
            bvn = -bvn;
        } else {
            const double l = h < 0.0 ? std_normal_cdf(k) - std_normal_cdf(h)
                                     : std_normal_cdf(-h) - std_normal_cdf(-k);
            bvn = l - bvn;
        }
    }
    return std::clamp(bvn, 0.0, 1.0);
}

/// Rectangle probability P(X <= x, Y <= y) for correlation r.
inline double bivariate_normal_cdf(double x, double y, double r) {
    return bivariate_normal_survival(-x, -y, r);
}

} // namespace copex
