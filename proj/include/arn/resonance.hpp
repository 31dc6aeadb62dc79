#pragma once

// Exact-arithmetic resonance math: the logistic squashing X of an input
// around a tuned centre, the bell-shaped output X*(k-X), the normalized
// aggregate over a vector of resonators, and the closed-form links
// between the steepness rho, the half-power coverage interval and a
// Gaussian-style spread sigma.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace arn {

// Output level at the edge of the covered interval: the bell drops to
// sqrt(peak^2 / 2) of its peak 1/4.
inline constexpr double RES_HALF_POWER = 0.17677669529663687; // 0.25/sqrt(2)

// rho * |x - x_m| at which the bell output falls to ~0.176. Derived by
// inverting X*(1-X) = 0.176: X = (1 + sqrt(1 - 4*0.176))/2, then
// rho*x = ln(X/(1-X)).
inline constexpr double RES_COVERAGE_RHOX = 1.2198478915569909;

// Coverage expressed against a spread sigma: x_c = 0.8325*sigma, which
// pins rho = 1.2198/(0.8325*sigma).
inline constexpr double RES_SIGMA_COVERAGE = 0.8325;
inline constexpr double RES_RHO_SIGMA = RES_COVERAGE_RHOX / RES_SIGMA_COVERAGE; // 1.4652...

inline double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Squashed input; the argument of the bell.
inline double resonance_x(double x, double rho, double x_m) {
    return logistic(rho * (x - x_m));
}

// Bell output X*(k-X); peak k^2/4 at x = x_m. k = 1 unless stated.
inline double resonate(double x, double rho, double x_m, double k = 1.0) {
    double X = resonance_x(x, rho, x_m);
    return X * (k - X);
}

// Normalized aggregate of N resonators sharing rho: (4/(N*k^2)) * sum of
// X_i*(k - X_i). Peaks at 1 when every input sits at its centre.
inline double aggregate(std::span<const double> x, std::span<const double> x_m,
                        double rho, double k = 1.0) {
    if (x.size() != x_m.size() || x.empty())
        throw std::invalid_argument("aggregate: mismatched or empty spans");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double X = resonance_x(x[i], rho, x_m[i]);
        s += X * (k - X);
    }
    return 4.0 / (double(x.size()) * k * k) * s;
}

// Input interval around x_m over which the output stays above the
// half-power level.
struct Coverage {
    double lo, hi;
};

inline Coverage coverage_bounds(double rho, double x_m) {
    if (rho <= 0) throw std::invalid_argument("coverage_bounds: rho > 0 required");
    double d = RES_COVERAGE_RHOX / rho;
    return {x_m - d, x_m + d};
}

inline double rho_from_sigma(double sigma) {
    if (sigma <= 0) throw std::invalid_argument("rho_from_sigma: sigma > 0 required");
    return RES_RHO_SIGMA / sigma;
}

inline Coverage coverage_from_sigma(double sigma, double x_m) {
    double d = RES_SIGMA_COVERAGE * sigma;
    return {x_m - d, x_m + d};
}

// d/dx of resonate at x: rho * X*(1-X)*(k-2X).
inline double resonate_deriv(double x, double rho, double x_m, double k = 1.0) {
    double X = resonance_x(x, rho, x_m);
    return rho * X * (1.0 - X) * (k - 2.0 * X);
}

} // namespace arn
