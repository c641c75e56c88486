#include <doctest.h>

#include <cmath>
#include <functional>

#include "coalopt/errors.hpp"
#include "coalopt/reservoir.hpp"

using namespace coalopt;

namespace {

// ============================================================================
// Oracle: E1(x) = integral_x^inf e^-u / u du by adaptive Simpson quadrature,
// fully independent of the series / continued-fraction implementation.
// The integrand below x + 90 carries all mass above 1e-39 of the total.
// ============================================================================

double simpson(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double eps, double whole, int depth) {
    const double c = 0.5 * (a + b);
    const double left = simpson(f, a, c);
    const double right = simpson(f, c, b);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, c, 0.5 * eps, left, depth - 1) +
           adaptive_simpson(f, c, b, 0.5 * eps, right, depth - 1);
}

double e1_quadrature(double x) {
    // Substituting u = x + v gives E1(x) = e^-x * integral_0^inf e^-v / (x+v) dv,
    // which keeps the integrand at O(1/x) scale so the tolerance can be
    // relative even when E1 itself is exponentially small.
    auto integrand = [x](double v) { return std::exp(-v) / (x + v); };
    const double whole = simpson(integrand, 0.0, 90.0);
    return std::exp(-x) *
           adaptive_simpson(integrand, 0.0, 90.0, 1e-13 * whole, whole, 60);
}

}  // namespace

TEST_SUITE("theis") {

TEST_CASE("E1 matches the quadrature oracle across both branches") {
    for (double x : {0.05, 0.25, 0.5, 0.9, 1.0, 1.1, 2.0, 5.0, 10.0, 30.0}) {
        const double oracle = e1_quadrature(x);
        const double val = exponential_integral_e1(x);
        CHECK(std::abs(val - oracle) <= 1e-8 * oracle);
    }
}

TEST_CASE("E1 at 1 matches the known constant") {
    CHECK(exponential_integral_e1(1.0) ==
          doctest::Approx(0.21938393439552026).epsilon(1e-12));
}

TEST_CASE("E1 is continuous across the series / fraction seam") {
    const double below = exponential_integral_e1(1.0 - 1e-12);
    const double above = exponential_integral_e1(1.0 + 1e-12);
    CHECK(std::abs(below - above) < 1e-9);
}

TEST_CASE("E1 decays to zero for large arguments") {
    CHECK(exponential_integral_e1(650.0) > 0.0);
    CHECK(exponential_integral_e1(650.0) < 1e-280);
    CHECK(exponential_integral_e1(800.0) == 0.0);
}

TEST_CASE("E1 rejects non-positive arguments") {
    CHECK_THROWS_AS(exponential_integral_e1(0.0), ValidationError);
    CHECK_THROWS_AS(exponential_integral_e1(-1.0), ValidationError);
    CHECK_THROWS_AS(exponential_integral_e1(std::nan("")), ValidationError);
}

TEST_CASE("Theis rise is linear in rate and decreasing in radius") {
    const double k = 1.9738466e-13, h = 100.0, mu = 6e-4, phi = 0.2, ct = 1e-9;
    const double t = kSecondsPerYear;
    const double base = theis_pressure_rise(0.05, k, h, mu, phi, ct, 10000.0, t);
    const double doubled = theis_pressure_rise(0.10, k, h, mu, phi, ct, 10000.0, t);
    CHECK(doubled == doctest::Approx(2.0 * base).epsilon(1e-12));
    const double nearer = theis_pressure_rise(0.05, k, h, mu, phi, ct, 5000.0, t);
    CHECK(nearer > base);
}

TEST_CASE("Theis rise vanishes as time goes to zero") {
    const double k = 1.9738466e-13, h = 100.0, mu = 6e-4, phi = 0.2, ct = 1e-9;
    CHECK(theis_pressure_rise(0.05, k, h, mu, phi, ct, 10000.0, 1e-12) == 0.0);
}

TEST_CASE("Theis rejects non-positive arguments") {
    const double k = 1.9738466e-13, h = 100.0, mu = 6e-4, phi = 0.2, ct = 1e-9;
    CHECK_THROWS_AS(theis_pressure_rise(0.0, k, h, mu, phi, ct, 1e4, 1.0),
                    ValidationError);
    CHECK_THROWS_AS(theis_pressure_rise(0.05, k, h, mu, phi, ct, -1e4, 1.0),
                    ValidationError);
    CHECK_THROWS_AS(theis_pressure_rise(0.05, k, h, mu, phi, ct, 1e4, 0.0),
                    ValidationError);
}

}  // TEST_SUITE
