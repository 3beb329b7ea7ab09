#include "riskpde/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace riskpde {

namespace {

constexpr double kBarrier = 2.0;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

void check_query(double x, double horizon, double lambda) {
    if (!std::isfinite(x) || !std::isfinite(horizon) || !std::isfinite(lambda))
        throw std::invalid_argument("query must be finite");
    if (horizon < 0.0)
        throw std::invalid_argument("horizon must be nonnegative");
}

double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

} // namespace

double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double log_norm_cdf_neg(double z) {
    if (z < 30.0) return std::log(0.5 * std::erfc(z / kSqrt2));
    // Tail expansion Phi(-z) = phi(z)/z (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8 ...),
    // relative truncation error below 1e-12 for z >= 30.
    const double z2 = z * z;
    const double series =
        1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2) +
        105.0 / (z2 * z2 * z2 * z2);
    return -0.5 * z2 - std::log(z) - 0.5 * kLog2Pi + std::log(series);
}

double closed_form_recovery(double x, double horizon, double lambda) {
    check_query(x, horizon, lambda);
    if (x >= kBarrier) return 1.0;
    if (horizon == 0.0) return 0.0;
    const double a = kBarrier - x;
    const double s = std::sqrt(horizon);
    const double z1 = (lambda * horizon - a) / s;
    const double z2 = (lambda * horizon + a) / s;
    // Second term evaluated in log space: e^{2 lambda a} Phi(-z2) stays
    // bounded even when each factor over/underflows on its own.
    const double term2 = std::exp(2.0 * lambda * a + log_norm_cdf_neg(z2));
    const double p = norm_cdf(z1) + term2;
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

double closed_form_gradient(double x, double horizon, double lambda) {
    check_query(x, horizon, lambda);
    if (horizon == 0.0) return 0.0; // d/dx of the indicator, away from the jump
    if (x > kBarrier)
        throw std::invalid_argument("gradient is defined for x <= 2");
    const double a = kBarrier - x;
    const double s = std::sqrt(horizon);
    const double z1 = (lambda * horizon - a) / s;
    const double z2 = (lambda * horizon + a) / s;
    const double t1 = norm_pdf(z1) / s;
    const double t2 = kInvSqrt2Pi * std::exp(2.0 * lambda * a - 0.5 * z2 * z2) / s;
    const double t3 = 2.0 * lambda * std::exp(2.0 * lambda * a + log_norm_cdf_neg(z2));
    return t1 + t2 - t3;
}

namespace {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1] (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                           0.3818300505051189, 0.4179591836734694};

template <class F>
void gk15(const F& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double d = h * kXgk[i];
        const double fsum = f(c - d) + f(c + d);
        resk += kWgk[i] * fsum;
        if (i % 2 == 1) resg += kWg[i / 2] * fsum;
    }
    kronrod = resk * h;
    err = std::fabs((resk - resg) * h);
}

// First-passage density of drifted Brownian motion to level a > 0.
double passage_density(double t, double a, double lambda) {
    const double d = a - lambda * t;
    return a / std::sqrt(2.0 * 3.141592653589793 * t * t * t) *
           std::exp(-d * d / (2.0 * t));
}

} // namespace

double analytic_recovery(double x, double horizon, double lambda) {
    check_query(x, horizon, lambda);
    if (x >= kBarrier) return 1.0;
    if (horizon == 0.0) return 0.0;
    const double a = kBarrier - x;
    if (a <= 1e-12) return 1.0; // at the barrier to within roundoff

    // Below eps the density is bounded by e^{a lambda} 2 Phi(-a/sqrt(eps)),
    // which vanishes (a/sqrt(eps) >= 40 by construction), so the [0, eps)
    // tail is dropped.
    const double eps = std::min(horizon / 2.0, (a / 40.0) * (a / 40.0));
    const double tol = 1e-8;
    const double total_len = horizon - eps;
    auto f = [&](double t) { return passage_density(t, a, lambda); };

    std::vector<std::pair<double, double>> stack{{eps, horizon}};
    double sum = 0.0, err_sum = 0.0;
    int budget = 4000;
    while (!stack.empty()) {
        if (--budget < 0)
            throw std::runtime_error("recovery quadrature did not converge");
        const auto [lo, hi] = stack.back();
        stack.pop_back();
        double val = 0.0, err = 0.0;
        gk15(f, lo, hi, val, err);
        if (err <= tol * ((hi - lo) / total_len) || hi - lo < 1e-14 * total_len) {
            sum += val;
            err_sum += err;
            continue;
        }
        const double mid = 0.5 * (lo + hi);
        stack.push_back({lo, mid});
        stack.push_back({mid, hi});
    }
    if (err_sum > tol)
        throw std::runtime_error("recovery quadrature error estimate above tolerance");
    return sum < 0.0 ? 0.0 : (sum > 1.0 ? 1.0 : sum);
}

ProbabilityField analytic_field(const GridSpec& grid, double lambda) {
    grid.validate();
    ProbabilityField f;
    f.grid = grid;
    f.kind = Kind::N;
    f.provenance = Provenance::Analytic;
    f.lambda = lambda;
    const int nx = grid.nx(), nt = grid.nt();
    f.values.resize(static_cast<std::size_t>(nx) * nt);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j)
            f.at(i, j) = closed_form_recovery(grid.x(i), grid.t(j), lambda);
    return f;
}

GradientField analytic_gradient_field(const GridSpec& grid, double lambda) {
    grid.validate();
    GradientField f;
    f.grid = grid;
    f.provenance = Provenance::Analytic;
    f.lambda = lambda;
    const int nx = grid.nx(), nt = grid.nt();
    f.values.resize(static_cast<std::size_t>(nx) * nt);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j)
            f.at(i, j) = closed_form_gradient(grid.x(i), grid.t(j), lambda);
    return f;
}

} // namespace riskpde
