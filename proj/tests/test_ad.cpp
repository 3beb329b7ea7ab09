#include <doctest.h>

#include <cmath>

#include "riskpde/ad.hpp"

using namespace riskpde;

namespace {

// Same expression evaluated on doubles (for finite differences) and on
// HyperDual. Exercises +, -, *, /, scalar mixing, tanh and exp.
template <class T>
T probe(T x, T t) {
    using std::exp;
    using std::tanh;
    return tanh(x * t + 0.3 * x * x) + exp(-0.5 * x) / (t + 3.0) -
           0.25 * x * x * t + (x + 2.0 * t) / (1.0 + x * x);
}

double fd_x(double x, double t, double h) {
    return (probe(x + h, t) - probe(x - h, t)) / (2.0 * h);
}
double fd_t(double x, double t, double h) {
    return (probe(x, t + h) - probe(x, t - h)) / (2.0 * h);
}
double fd_xx(double x, double t, double h) {
    return (probe(x + h, t) - 2.0 * probe(x, t) + probe(x - h, t)) / (h * h);
}

} // namespace

TEST_CASE("tanh derivatives at 1") {
    const HyperDual h = tanh(HyperDual::var_x(1.0));
    CHECK(h.val == doctest::Approx(0.7615941559557649).epsilon(1e-15));
    CHECK(h.dx == doctest::Approx(0.41997434161402614).epsilon(1e-14));
    CHECK(h.dxx == doctest::Approx(-0.6397000084492246).epsilon(1e-13));
}

TEST_CASE("hyperdual matches central differences") {
    const double xs[] = {-1.7, -0.4, 0.2, 0.9, 1.8};
    const double ts[] = {0.3, 1.1, 2.7};
    for (double x : xs)
        for (double t : ts) {
            const HyperDual r = probe(HyperDual::var_x(x), HyperDual::var_t(t));
            CHECK(r.val == doctest::Approx(probe(x, t)).epsilon(1e-14));
            CHECK(r.dx == doctest::Approx(fd_x(x, t, 1e-6)).epsilon(1e-8));
            CHECK(r.dt == doctest::Approx(fd_t(x, t, 1e-6)).epsilon(1e-8));
            CHECK(r.dxx == doctest::Approx(fd_xx(x, t, 1e-4)).epsilon(1e-5));
        }
}

TEST_CASE("constants carry no derivatives") {
    const HyperDual c = HyperDual::constant(3.5);
    const HyperDual r = tanh(c * c + 1.0) / (c - 0.5);
    CHECK(r.dx == 0.0);
    CHECK(r.dt == 0.0);
    CHECK(r.dxx == 0.0);
}

TEST_CASE("product and quotient second derivative") {
    // (x^2 * x)''' sanity via x^3: d2/dx2 = 6x.
    const double x = 1.3;
    const HyperDual v = HyperDual::var_x(x);
    const HyperDual cube = v * v * v;
    CHECK(cube.val == doctest::Approx(x * x * x).epsilon(1e-15));
    CHECK(cube.dx == doctest::Approx(3.0 * x * x).epsilon(1e-15));
    CHECK(cube.dxx == doctest::Approx(6.0 * x).epsilon(1e-15));

    // 1/x: first -1/x^2, second 2/x^3.
    const HyperDual inv = 1.0 / v;
    CHECK(inv.dx == doctest::Approx(-1.0 / (x * x)).epsilon(1e-14));
    CHECK(inv.dxx == doctest::Approx(2.0 / (x * x * x)).epsilon(1e-14));
}

TEST_CASE("exp chain rule") {
    const double x = 0.7;
    const HyperDual r = exp(HyperDual::var_x(x) * 2.0);
    CHECK(r.val == doctest::Approx(std::exp(2.0 * x)).epsilon(1e-15));
    CHECK(r.dx == doctest::Approx(2.0 * std::exp(2.0 * x)).epsilon(1e-14));
    CHECK(r.dxx == doctest::Approx(4.0 * std::exp(2.0 * x)).epsilon(1e-14));
}
