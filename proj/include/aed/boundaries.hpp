#pragma once
// Two-look group-sequential local significance levels.

#include "aed/error.hpp"
#include "aed/normal.hpp"
#include "aed/root_finding.hpp"

#include <cmath>

namespace aed {

struct BoundaryPair {
    double alpha_total = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double z1 = 0.0;
    double z2 = 0.0;
    double t1 = 0.0;  // information fraction of the first look

    // Correlation between the stage-1 and the combined statistic.
    double correlation() const noexcept { return std::sqrt(t1); }
};

// Overall rejection probability under the global null of the two-look
// procedure with critical values (z1, z2):
//   P(Z1 > z1) + P(Z1 <= z1, Z2 > z2).
inline double two_look_crossing_probability(double z1, double z2, double t1) {
    const double rho = std::sqrt(t1);
    return std_normal_sf(z1) + std_normal_sf(z2) - bivariate_upper_orthant(z1, z2, rho);
}

// Solves for the second-look level that, together with alpha1 spent at the
// first look, exhausts alpha_total.
inline BoundaryPair solve_boundaries(double alpha_total, double alpha1, double t1) {
    if (!(alpha_total > 0.0 && alpha_total < 1.0))
        throw DomainError("solve_boundaries: alpha_total must lie in (0, 1)");
    if (!(alpha1 > 0.0 && alpha1 < alpha_total))
        throw DomainError("solve_boundaries: alpha1 must lie in (0, alpha_total)");
    if (!(t1 > 0.0 && t1 < 1.0))
        throw DomainError("solve_boundaries: information fraction must lie in (0, 1)");

    BoundaryPair out;
    out.alpha_total = alpha_total;
    out.alpha1 = alpha1;
    out.t1 = t1;
    // Lower-tail form; 1 - alpha1 would round.
    out.z1 = -std_normal_quantile(alpha1);

    auto excess = [&](double z2) {
        return two_look_crossing_probability(out.z1, z2, t1) - alpha_total;
    };
    constexpr double lo = 0.0;
    constexpr double hi = kNormalTailCutoff;
    if (!(excess(lo) > 0.0))
        throw InfeasibleError("solve_boundaries: alpha_total cannot be reached with z2 >= 0");
    if (!(excess(hi) < 0.0))
        throw InfeasibleError("solve_boundaries: no remaining alpha for the second look");

    RootOptions opt;
    opt.x_tol = 1e-12;
    const Root root = brent_root(excess, lo, hi, opt);
    out.z2 = root.x;
    out.alpha2 = std_normal_sf(out.z2);
    return out;
}

// alpha1 = spend_fraction * alpha_total.
inline BoundaryPair solve_boundaries_from_spend(double alpha_total, double spend_fraction,
                                                double t1) {
    if (!(spend_fraction > 0.0 && spend_fraction < 1.0))
        throw DomainError("solve_boundaries_from_spend: spend fraction must lie in (0, 1)");
    return solve_boundaries(alpha_total, spend_fraction * alpha_total, t1);
}

} // namespace aed
