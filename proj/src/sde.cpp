#include "riskpde/sde.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "riskpde/grid.hpp"
#include "riskpde/rng.hpp"

namespace riskpde {

void SdeModel::effective_drift(std::span<const double> x, std::span<double> out) const {
    drift(x, out);
    if (control_dim <= 0) return;
    std::vector<double> g(static_cast<std::size_t>(dim) * control_dim);
    std::vector<double> u(static_cast<std::size_t>(control_dim));
    gain(x, g);
    controller(x, u);
    for (int i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (int j = 0; j < control_dim; ++j)
            acc += g[static_cast<std::size_t>(i) * control_dim + j] * u[j];
        out[i] += acc;
    }
}

bool SdeModel::in_box(std::span<const double> x) const {
    for (int i = 0; i < dim; ++i) {
        if (!std::isfinite(x[i])) return false;
        if (x[i] < box_lo[i] || x[i] > box_hi[i]) return false;
    }
    return true;
}

namespace {

long long step_count(double horizon, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("dt must be positive");
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("horizon must be nonnegative");
    if (horizon == 0.0) return 0;
    if (dt > horizon + 1e-12)
        throw std::invalid_argument("dt exceeds the horizon");
    const long long n = std::llround(horizon / dt);
    if (n < 1 || std::fabs(static_cast<double>(n) * dt - horizon) >
                     1e-9 * std::max(1.0, horizon))
        throw std::invalid_argument("dt must divide the horizon");
    return n;
}

// Shared Euler-Maruyama core. drift/noise write into caller buffers; the
// box check runs on every visited state when lo/hi are given.
Trajectory integrate(int dim, int noise_dim, const VecFn& drift_fn, const VecFn& noise_fn,
                     const double* lo, const double* hi, std::span<const double> x0,
                     double horizon, double dt, std::uint64_t seed, std::uint64_t stream) {
    if (static_cast<int>(x0.size()) != dim)
        throw std::invalid_argument("initial state has the wrong dimension");
    const long long steps = step_count(horizon, dt);

    Trajectory traj;
    traj.dim = dim;
    traj.dt = dt;
    traj.seed = seed;
    traj.times.resize(static_cast<std::size_t>(steps) + 1);
    traj.states.resize((static_cast<std::size_t>(steps) + 1) * dim);

    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> mu(dim), sig(static_cast<std::size_t>(dim) * noise_dim),
        xi(noise_dim);

    auto check = [&](long long k) {
        for (int i = 0; i < dim; ++i) {
            if (!std::isfinite(x[i]))
                throw std::runtime_error("non-finite state at step " + std::to_string(k));
            if (lo && (x[i] < lo[i] || x[i] > hi[i]))
                throw std::runtime_error("state left the model domain box at step " +
                                         std::to_string(k));
        }
    };
    check(0);
    traj.times[0] = 0.0;
    std::copy(x.begin(), x.end(), traj.states.begin());

    NormalStream rng(seed, stream);
    const double sq = std::sqrt(dt);
    for (long long k = 1; k <= steps; ++k) {
        drift_fn(x, mu);
        noise_fn(x, sig);
        for (int j = 0; j < noise_dim; ++j) xi[j] = rng.next();
        detail::em_step(x, mu, sig, xi, dt, sq, dim, noise_dim);
        check(k);
        traj.times[static_cast<std::size_t>(k)] = static_cast<double>(k) * dt;
        std::copy(x.begin(), x.end(),
                  traj.states.begin() + static_cast<std::size_t>(k) * dim);
    }
    return traj;
}

} // namespace

Trajectory simulate(const SdeModel& model, std::span<const double> x0, double horizon,
                    double dt, std::uint64_t seed, std::uint64_t stream) {
    if (!model.in_box(x0))
        throw std::invalid_argument("initial state is outside the model domain box");
    VecFn mu = [&model](std::span<const double> x, std::span<double> out) {
        model.effective_drift(x, out);
    };
    return integrate(model.dim, model.noise_dim, mu, model.noise, model.box_lo.data(),
                     model.box_hi.data(), x0, horizon, dt, seed, stream);
}

Trajectory simulate_augmented(const AugmentedDynamics& dyn, std::span<const double> z0,
                              double horizon, double dt, std::uint64_t seed,
                              std::uint64_t stream) {
    return integrate(dyn.dim, dyn.noise_dim, dyn.rho, dyn.zeta, nullptr, nullptr, z0,
                     horizon, dt, seed, stream);
}

AugmentedDynamics augment(const SdeModel& model, const BarrierSpec& barrier) {
    const int n = model.dim, k = model.noise_dim;
    AugmentedDynamics dyn;
    dyn.dim = n + 1;
    dyn.noise_dim = k;

    // z = [phi; x]; coefficient evaluation reads x out of z.
    dyn.rho = [model, barrier, n, k](std::span<const double> z, std::span<double> out) {
        const std::span<const double> x = z.subspan(1, static_cast<std::size_t>(n));
        model.effective_drift(x, out.subspan(1, static_cast<std::size_t>(n)));
        std::vector<double> grad(n), hess(static_cast<std::size_t>(n) * n),
            sig(static_cast<std::size_t>(n) * k);
        barrier.grad(x, grad);
        barrier.hess(x, hess);
        model.noise(x, sig);
        // Ito drift of phi(X): grad.mu + (1/2) tr(sigma sigma^T hess).
        double a = 0.0;
        for (int i = 0; i < n; ++i) a += grad[i] * out[1 + i];
        double trace = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double ss = 0.0;
                for (int c = 0; c < k; ++c)
                    ss += sig[static_cast<std::size_t>(i) * k + c] *
                          sig[static_cast<std::size_t>(j) * k + c];
                trace += ss * hess[static_cast<std::size_t>(j) * n + i];
            }
        out[0] = a + 0.5 * trace;
    };

    dyn.zeta = [model, barrier, n, k](std::span<const double> z, std::span<double> out) {
        const std::span<const double> x = z.subspan(1, static_cast<std::size_t>(n));
        std::vector<double> grad(n), sig(static_cast<std::size_t>(n) * k);
        barrier.grad(x, grad);
        model.noise(x, sig);
        for (int c = 0; c < k; ++c) {
            double top = 0.0;
            for (int i = 0; i < n; ++i)
                top += grad[i] * sig[static_cast<std::size_t>(i) * k + c];
            out[c] = top;
        }
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < k; ++c)
                out[static_cast<std::size_t>(1 + i) * k + c] =
                    sig[static_cast<std::size_t>(i) * k + c];
    };

    const VecFn zeta = dyn.zeta;
    const int zn = dyn.dim;
    dyn.dmat = [zeta, zn, k](std::span<const double> z, std::span<double> out) {
        std::vector<double> zt(static_cast<std::size_t>(zn) * k);
        zeta(z, zt);
        for (int i = 0; i < zn; ++i)
            for (int j = 0; j < zn; ++j) {
                double acc = 0.0;
                for (int c = 0; c < k; ++c)
                    acc += zt[static_cast<std::size_t>(i) * k + c] *
                           zt[static_cast<std::size_t>(j) * k + c];
                out[static_cast<std::size_t>(i) * zn + j] = acc;
            }
    };
    return dyn;
}

void Trajectory::write_csv(std::ostream& os) const {
    os << 't';
    for (int i = 1; i <= dim; ++i) os << ",x" << i;
    os << '\n';
    for (std::size_t k = 0; k < times.size(); ++k) {
        os << format_double(times[k]);
        for (int i = 0; i < dim; ++i)
            os << ',' << format_double(states[k * dim + i]);
        os << '\n';
    }
    if (!os) throw std::runtime_error("trajectory CSV write failed");
}

SdeModel benchmark_model(double lambda) {
    if (!std::isfinite(lambda))
        throw std::invalid_argument("lambda must be finite");
    SdeModel m;
    m.dim = 1;
    m.control_dim = 1;
    m.noise_dim = 1;
    m.drift = [lambda](std::span<const double>, std::span<double> out) { out[0] = lambda; };
    m.gain = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
    m.noise = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
    m.controller = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
    // Constant coefficients are valid everywhere; the box only has to be wide
    // enough that no sane experiment's paths can leave it.
    m.box_lo = {-1e6};
    m.box_hi = {1e6};
    m.scalar_constant = true;
    m.const_drift = lambda;
    m.const_sigma = 1.0;
    return m;
}

BarrierSpec benchmark_barrier() {
    BarrierSpec b;
    b.phi = [](std::span<const double> x) { return x[0] - 2.0; };
    b.grad = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
    b.hess = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
    b.level = 0.0;
    b.scalar_affine = true;
    b.slope = 1.0;
    b.intercept = -2.0;
    return b;
}

SdeModel make_model(const std::string& family, double lambda) {
    if (family == "benchmark-drift") return benchmark_model(lambda);
    throw std::invalid_argument("unknown model family: " + family);
}

} // namespace riskpde
