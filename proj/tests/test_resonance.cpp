#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <arn/resonance.hpp>

#include <array>
#include <vector>

using namespace arn;

TEST_CASE("peak at the resonant input") {
    for (double rho : {0.5, 1.0, 2.42, 5.0})
        for (double xm : {-1.0, 0.0, 0.25, 3.0}) {
            CHECK(resonate(xm, rho, xm) == 0.25);
            CHECK(resonate(xm + 0.1, rho, xm) < 0.25);
            CHECK(resonate(xm - 0.1, rho, xm) < 0.25);
        }
    // For k != 1 the centre gives X = 1/2, so the output is (k - 1/2)/2.
    CHECK(resonate(0.0, 1.0, 0.0, 2.0) == doctest::Approx(0.75));
}

TEST_CASE("reference point from the fabricated unit") {
    CHECK(resonate(0.5, 2.42, 0.25) == doctest::Approx(0.2284).epsilon(5e-4));
    CHECK(std::fabs(resonate(0.5, 2.42, 0.25) - 0.2284) < 1e-4);
}

TEST_CASE("even symmetry around the centre") {
    for (double d : {0.01, 0.3, 1.7})
        CHECK(resonate(0.25 + d, 2.42, 0.25) ==
              doctest::Approx(resonate(0.25 - d, 2.42, 0.25)).epsilon(1e-12));
}

TEST_CASE("half-power coverage bounds") {
    for (double rho : {1.0, 2.0, 2.42, 3.0, 5.0}) {
        auto c = coverage_bounds(rho, 0.4);
        CHECK(c.hi - 0.4 == doctest::Approx(1.2198 / rho).epsilon(1e-3));
        CHECK(resonate(c.lo, rho, 0.4) == doctest::Approx(0.176).epsilon(0.002 / 0.176));
        CHECK(resonate(c.hi, rho, 0.4) == doctest::Approx(0.176).epsilon(0.002 / 0.176));
        CHECK(std::fabs(resonate(c.hi, rho, 0.4) - RES_HALF_POWER) < 2e-3);
    }
    CHECK_THROWS(coverage_bounds(0.0, 0.0));
}

TEST_CASE("sigma-linked tuning") {
    for (double sigma : {0.1, 0.5, 1.0, 2.0}) {
        double rho = rho_from_sigma(sigma);
        CHECK(rho == doctest::Approx(1.4652 / sigma).epsilon(1e-4));
        auto a = coverage_bounds(rho, 0.0);
        auto b = coverage_from_sigma(sigma, 0.0);
        CHECK(a.hi == doctest::Approx(b.hi).epsilon(1e-6));
        CHECK(b.hi == doctest::Approx(0.8325 * sigma).epsilon(1e-6));
    }
}

TEST_CASE("output equals the scaled sigmoid derivative") {
    // X*(1-X) is d/dt of the logistic, checked by central difference.
    for (double rho : {1.0, 2.42, 4.0})
        for (double x : {-0.8, 0.0, 0.13, 0.5, 2.0}) {
            double h = 1e-5, t = rho * (x - 0.25);
            double num = (logistic(t + h) - logistic(t - h)) / (2 * h);
            CHECK(std::fabs(resonate(x, rho, 0.25) - num) < 1e-6);
        }
}

TEST_CASE("aggregate normalization and permutation invariance") {
    std::vector<double> xs{0.1, 0.4, 0.9, 0.3};
    std::vector<double> cs{0.1, 0.4, 0.9, 0.3};
    CHECK(aggregate(xs, cs, 2.42) == doctest::Approx(1.0));
    std::vector<double> xp{0.4, 0.1, 0.3, 0.9}, cp{0.4, 0.1, 0.3, 0.9};
    CHECK(aggregate(xp, cp, 2.42) == doctest::Approx(aggregate(xs, cs, 2.42)));
    std::vector<double> off{0.2, 0.4, 0.9, 0.3};
    CHECK(aggregate(off, cs, 2.42) < 1.0);
    CHECK_THROWS(aggregate(std::vector<double>{}, std::vector<double>{}, 1.0));
}

TEST_CASE("sixteen-lane sum matches the published run") {
    // The published 16-resonator register dump: exact outputs sum to ~3.8047.
    const double x[16] = {0.5, 0.2, 0.33, 0.78, 0.14, 0.26, 0.2, 0.56,
                          0.34, 0.9, 0.59, 0.7, 0.5, 0.66, 0.94, 0.86};
    const double xm[16] = {0.25, 0.15, 0.13, 0.5, 0.05, 0.21, 0.1, 0.43,
                           0.2, 0.7, 0.4, 0.35, 0.23, 0.61, 0.82, 0.77};
    double s = 0;
    for (int i = 0; i < 16; ++i) s += resonate(x[i], 2.42, xm[i]);
    // The published per-lane column actually totals 3.8147; the printed
    // grand total of 3.8047 disagrees with its own column by 0.01, so
    // the tolerance covers that discrepancy.
    CHECK(std::fabs(s - 3.8047) < 0.015);
    CHECK(s == doctest::Approx(3.8147).epsilon(3e-4));
}

TEST_CASE("derivative helper") {
    for (double x : {-0.3, 0.0, 0.7}) {
        double h = 1e-6;
        double num = (resonate(x + h, 2.42, 0.1) - resonate(x - h, 2.42, 0.1)) / (2 * h);
        CHECK(resonate_deriv(x, 2.42, 0.1) == doctest::Approx(num).epsilon(1e-5));
    }
    CHECK(resonate_deriv(0.1, 2.42, 0.1) == doctest::Approx(0.0));
}

TEST_CASE("half-power constant") {
    CHECK(RES_HALF_POWER == doctest::Approx(std::sqrt(0.25 * 0.25 / 2.0)));
    // The coverage constant matches acosh(1.8409) to three decimals.
    CHECK(RES_COVERAGE_RHOX == doctest::Approx(std::acosh(1.8409)).epsilon(1e-3));
}
