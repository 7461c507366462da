#pragma once
// Standard normal numerics: CDF, quantile and the bivariate upper orthant.

#include "aed/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace aed {

// Arguments beyond this magnitude are clamped; Phi(-38) underflows double.
inline constexpr double kNormalTailCutoff = 38.0;

inline double std_normal_pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double std_normal_cdf(double x) noexcept {
    if (x <= -kNormalTailCutoff) return 0.0;
    if (x >= kNormalTailCutoff) return 1.0;
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Upper tail 1 - Phi(x), accurate in the far right tail.
inline double std_normal_sf(double x) noexcept { return std_normal_cdf(-x); }

enum class QuantileEdge {
    Throw,    // p in {0, 1} raises DomainError
    Infinity  // p in {0, 1} maps to -inf / +inf
};

namespace detail {

// Wichura's AS 241 (PPND16) for the lower-tail probability p <= 0.5.
inline double ppnd16_lower(double p) noexcept {
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = std::sqrt(-std::log(p));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return -x;
}

} // namespace detail

// Inverse of std_normal_cdf on (0, 1).
inline double std_normal_quantile(double p, QuantileEdge edge = QuantileEdge::Throw) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("std_normal_quantile: p outside [0, 1]");
    if (p == 0.0 || p == 1.0) {
        if (edge == QuantileEdge::Throw)
            throw DomainError("std_normal_quantile: p must lie strictly inside (0, 1)");
        return p == 0.0 ? -std::numeric_limits<double>::infinity()
                        : std::numeric_limits<double>::infinity();
    }
    if (p == 0.5) return 0.0;
    // Work in the lower tail; 1 - p is exact for p >= 0.5.
    const bool upper = p > 0.5;
    const double lower_p = upper ? 1.0 - p : p;
    double x = detail::ppnd16_lower(lower_p);
    // Newton polish against the erfc-based CDF.
    for (int i = 0; i < 2; ++i) {
        const double density = std_normal_pdf(x);
        if (density <= 0.0) break;
        x -= (std_normal_cdf(x) - lower_p) / density;
    }
    return upper ? -x : x;
}

namespace detail {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
template <std::size_t N>
struct GaussLegendre {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussLegendre() {
        for (std::size_t i = 0; i < N; ++i) {
            double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(N) + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (std::size_t k = 2; k <= N; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = N * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-16) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

inline const GaussLegendre<20>& gauss_legendre_20() {
    static const GaussLegendre<20> rule;
    return rule;
}

} // namespace detail

// P(X > a, Y > b) for a standard bivariate normal pair with correlation rho.
//
// Drezner-Wesolowsky reduction of the orthant to a one-dimensional integral
// over the correlation (Genz's formulation), evaluated with a 20-point
// Gauss-Legendre rule. For |rho| >= 0.925 the integrand is rewritten in
// terms of sqrt(1 - rho^2) so it stays smooth near the singular endpoint.
inline double bivariate_upper_orthant(double a, double b, double rho) {
    if (!(rho > -1.0 && rho < 1.0))
        throw DomainError("bivariate_upper_orthant: correlation must lie in (-1, 1)");
    a = std::clamp(a, -kNormalTailCutoff, kNormalTailCutoff);
    b = std::clamp(b, -kNormalTailCutoff, kNormalTailCutoff);

    const auto& gl = detail::gauss_legendre_20();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double h = a;
    double k = b;
    double hk = h * k;
    double result = 0.0;

    if (std::fabs(rho) < 0.925) {
        // Integrate d/dr P over r in [0, rho]; sn = sin of a point in [0, asin(rho)].
        const double hs = 0.5 * (h * h + k * k);
        const double asr = std::asin(rho);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double sn = std::sin(0.5 * asr * (gl.nodes[i] + 1.0));
            result += gl.weights[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
        result = result * asr / (2.0 * two_pi) + std_normal_sf(h) * std_normal_sf(k);
        return std::clamp(result, 0.0, 1.0);
    }

    if (rho < 0.0) {
        k = -k;
        hk = -hk;
    }
    const double as = (1.0 - rho) * (1.0 + rho);
    double aa = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    double asr = -0.5 * (bs / as + hk);
    if (asr > -100.0)
        result = aa * std::exp(asr) *
                 (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (-hk < 100.0) {
        const double bb = std::sqrt(bs);
        result -= std::exp(-0.5 * hk) * std::sqrt(two_pi) * std_normal_cdf(-bb / aa) * bb *
                  (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    aa *= 0.5;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double xs = std::pow(aa * (gl.nodes[i] + 1.0), 2);
        const double rs = std::sqrt(1.0 - xs);
        asr = -0.5 * (bs / xs + hk);
        if (asr > -100.0)
            result += aa * gl.weights[i] * std::exp(asr) *
                      (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                       (1.0 + c * xs * (1.0 + d * xs)));
    }
    result = -result / two_pi;

    if (rho > 0.0) {
        result += std_normal_sf(std::max(h, k));
    } else {
        result = -result;
        if (k > h) {
            if (h < 0.0)
                result += std_normal_cdf(k) - std_normal_cdf(h);
            else
                result += std_normal_sf(h) - std_normal_sf(k);
        }
    }
    return std::clamp(result, 0.0, 1.0);
}

} // namespace aed
