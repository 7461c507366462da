#pragma once

#include "aed/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

namespace aed {

struct RootOptions {
    double x_tol = 1e-14;        // absolute width at which the bracket is accepted
    double f_tol = 0.0;          // |f(x)| at or below this stops immediately
    std::size_t max_iter = 300;
};

struct Root {
    double x = 0.0;
    double fx = 0.0;
    std::size_t iterations = 0;
};

// Brent's method on a bracket [lo, hi] with f(lo), f(hi) of opposite sign
// (or one of them zero). Throws InfeasibleError when the bracket does not
// straddle a root.
template <class F>
Root brent_root(F&& f, double lo, double hi, const RootOptions& opt = {}) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, fa, 0};
    if (fb == 0.0) return {b, fb, 0};
    if ((fa > 0.0) == (fb > 0.0))
        throw InfeasibleError("brent_root: function does not change sign over the bracket");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (std::size_t iter = 1; iter <= opt.max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * 2.220446049250313e-16 * std::fabs(b) + 0.5 * opt.x_tol;
        const double m = 0.5 * (c - b);
        if (std::fabs(m) <= tol || fb == 0.0 || std::fabs(fb) <= opt.f_tol)
            return {b, fb, iter};

        if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
            // Inverse quadratic interpolation, or secant when a == c.
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += std::fabs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    return {b, fb, opt.max_iter};
}

} // namespace aed
