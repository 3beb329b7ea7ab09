#pragma once

// Controlled SDE models dX = (f(X) + g(X) K(X)) dt + sigma(X) dW, the barrier
// function that defines the safe set, and the augmented dynamics of
// Z = [phi(X); X] used by the PDE characterizations.

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace riskpde {

using VecFn = std::function<void(std::span<const double> x, std::span<double> out)>;

struct SdeModel {
    int dim = 1;         // n, state dimension
    int control_dim = 1; // m
    int noise_dim = 1;   // k
    VecFn drift;         // f(x): R^n
    VecFn gain;          // g(x): n x m, row-major
    VecFn noise;         // sigma(x): n x k, row-major
    VecFn controller;    // K(x): R^m
    // Coefficients are trusted only inside this box; initial states, grid
    // nodes, and every visited path state must stay inside it.
    std::vector<double> box_lo, box_hi;

    // Set for scalar models with constant coefficients; lets hot loops skip
    // the std::function dispatch. Semantics are identical to the generic path.
    bool scalar_constant = false;
    double const_drift = 0.0;
    double const_sigma = 1.0;

    // Effective drift f(x) + g(x) K(x).
    void effective_drift(std::span<const double> x, std::span<double> out) const;
    bool in_box(std::span<const double> x) const;
};

struct BarrierSpec {
    std::function<double(std::span<const double>)> phi;
    VecFn grad; // R^n
    VecFn hess; // n x n, row-major
    double level = 0.0;

    // Set when phi(x) = slope*x[0] + intercept (scalar state).
    bool scalar_affine = false;
    double slope = 1.0;
    double intercept = 0.0;
};

// Ito dynamics of Z = [phi(X); X]:
//   rho(z)  = [grad_phi . mu + (1/2) tr(sigma sigma^T hess_phi); mu],  mu = f + gK
//   zeta(z) = [grad_phi^T sigma; sigma]   ((n+1) x k)
//   dmat    = zeta zeta^T                 ((n+1) x (n+1))
// The x needed to evaluate the coefficients is read from z[1..n].
struct AugmentedDynamics {
    int dim = 2;       // n+1
    int noise_dim = 1; // k
    VecFn rho;
    VecFn zeta;
    VecFn dmat;
};

AugmentedDynamics augment(const SdeModel&, const BarrierSpec&);

struct Trajectory {
    int dim = 1;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> times;  // steps+1 entries, uniform spacing dt
    std::vector<double> states; // (steps+1) x dim, row-major

    int steps() const { return static_cast<int>(times.size()) - 1; }
    std::span<const double> state(int k) const {
        return {states.data() + static_cast<std::size_t>(k) * dim,
                static_cast<std::size_t>(dim)};
    }
    void write_csv(std::ostream&) const; // header t,x1..xn
};

// Euler-Maruyama from t=0 to t=horizon. Draw order contract: at each step the
// noise_dim standard normals are taken in channel order from NormalStream
// (key=seed, stream=stream); every consumer that must reproduce these paths
// (the Monte Carlo estimator) follows the same order.
Trajectory simulate(const SdeModel&, std::span<const double> x0, double horizon,
                    double dt, std::uint64_t seed, std::uint64_t stream = 0);

// Same integrator on the augmented dynamics; with equal (seed, stream) it
// consumes exactly the noise sequence of the matching simulate() call.
Trajectory simulate_augmented(const AugmentedDynamics&, std::span<const double> z0,
                              double horizon, double dt, std::uint64_t seed,
                              std::uint64_t stream = 0);

// Benchmark family: dX = lambda dt + dW on a wide box, phi(x) = x - 2, level 0.
SdeModel benchmark_model(double lambda);
BarrierSpec benchmark_barrier();

// Model families registered by name. Knows "benchmark-drift".
SdeModel make_model(const std::string& family, double lambda);

namespace detail {

// One Euler-Maruyama update, shared by the trajectory integrator and the
// Monte Carlo inner loops so both produce bit-identical states. Spelled with
// fma: left to contraction the compiler may round the same expression
// differently at different inlining sites, and this function is inlined into
// several translation units.
inline void em_step(std::span<double> x, std::span<const double> mu,
                    std::span<const double> sig, std::span<const double> xi,
                    double dt, double sqrt_dt, int dim, int noise_dim) {
    for (int i = 0; i < dim; ++i) {
        double diff = 0.0;
        for (int j = 0; j < noise_dim; ++j)
            diff = std::fma(sig[static_cast<std::size_t>(i) * noise_dim + j], xi[j], diff);
        x[i] = std::fma(sqrt_dt, diff, std::fma(mu[i], dt, x[i]));
    }
}

} // namespace detail

} // namespace riskpde
