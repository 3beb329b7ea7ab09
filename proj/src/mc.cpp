#include "riskpde/mc.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "riskpde/parallel.hpp"
#include "riskpde/rng.hpp"

namespace riskpde {

namespace {

// F and G resolve on the first sampled time with phi < level, Q and N on the
// first with phi >= level. "crossed" counts paths where that happened by the
// horizon; the kind decides which side of the split it reports.
bool crossing_is_below(Kind kind) { return kind == Kind::F || kind == Kind::G; }

double crossed_share_to_value(Kind kind, std::uint64_t crossed, std::uint64_t n) {
    const double share = static_cast<double>(crossed) / static_cast<double>(n);
    switch (kind) {
        case Kind::F: return 1.0 - share; // never dipped below
        case Kind::G: return share;       // dipped below
        case Kind::Q: return 1.0 - share; // never reached the level
        case Kind::N: return share;       // reached the level
    }
    throw std::logic_error("bad kind");
}

long long mc_step_count(double horizon, double dt) {
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

// Counts paths whose crossing happens at a sampled time <= horizon. Paths
// stop as soon as the crossing resolves; path p draws from
// NormalStream(seed, p) so the count is independent of evaluation order.
std::uint64_t count_crossed_generic(const SdeModel& model, const BarrierSpec& barrier,
                                    std::span<const double> x0, long long steps,
                                    double dt, bool below, std::uint64_t n_paths,
                                    std::uint64_t seed) {
    const int dim = model.dim, k = model.noise_dim;
    const double sq = std::sqrt(dt);
    std::vector<double> x(dim), mu(dim), sig(static_cast<std::size_t>(dim) * k), xi(k);
    std::uint64_t crossed = 0;
    for (std::uint64_t p = 0; p < n_paths; ++p) {
        std::copy(x0.begin(), x0.end(), x.begin());
        double phi = barrier.phi(x);
        bool hit = below ? (phi < barrier.level) : (phi >= barrier.level);
        NormalStream rng(seed, p);
        for (long long s = 1; s <= steps && !hit; ++s) {
            model.effective_drift(x, mu);
            model.noise(x, sig);
            for (int j = 0; j < k; ++j) xi[j] = rng.next();
            detail::em_step(x, mu, sig, xi, dt, sq, dim, k);
            for (int i = 0; i < dim; ++i) {
                if (!std::isfinite(x[i]))
                    throw std::runtime_error("non-finite state at step " +
                                             std::to_string(s));
                if (x[i] < model.box_lo[i] || x[i] > model.box_hi[i])
                    throw std::runtime_error("state left the model domain box at step " +
                                             std::to_string(s));
            }
            phi = barrier.phi(x);
            hit = below ? (phi < barrier.level) : (phi >= barrier.level);
        }
        crossed += hit ? 1 : 0;
    }
    return crossed;
}

// Same loop for constant scalar coefficients and an affine barrier; the state
// update is the em_step expression specialized to one dimension.
std::uint64_t count_crossed_scalar(double x0, double mu, double sigma, double box_lo,
                                   double box_hi, double slope, double intercept,
                                   double level, long long steps, double dt, bool below,
                                   std::uint64_t n_paths, std::uint64_t seed) {
    const double sq = std::sqrt(dt);
    std::uint64_t crossed = 0;
    for (std::uint64_t p = 0; p < n_paths; ++p) {
        double x = x0;
        double phi = slope * x + intercept;
        bool hit = below ? (phi < level) : (phi >= level);
        NormalStream rng(seed, p);
        for (long long s = 1; s <= steps && !hit; ++s) {
            const double xi = rng.next();
            const double diff = sigma * xi;
            x += mu * dt + sq * diff;
            if (!(x >= box_lo && x <= box_hi))
                throw std::runtime_error("state left the model domain box at step " +
                                         std::to_string(s));
            phi = slope * x + intercept;
            hit = below ? (phi < level) : (phi >= level);
        }
        crossed += hit ? 1 : 0;
    }
    return crossed;
}

} // namespace

McEstimate estimate_point(const SdeModel& model, const BarrierSpec& barrier,
                          std::span<const double> x0, double horizon, Kind kind,
                          std::uint64_t n_paths, double dt, std::uint64_t seed) {
    if (n_paths == 0) throw std::invalid_argument("n_paths must be positive");
    if (static_cast<int>(x0.size()) != model.dim)
        throw std::invalid_argument("initial state has the wrong dimension");
    if (!model.in_box(x0))
        throw std::invalid_argument("initial state is outside the model domain box");
    const long long steps = mc_step_count(horizon, dt);
    const bool below = crossing_is_below(kind);

    std::uint64_t crossed;
    if (model.scalar_constant && barrier.scalar_affine && model.dim == 1)
        crossed = count_crossed_scalar(x0[0], model.const_drift, model.const_sigma,
                                       model.box_lo[0], model.box_hi[0], barrier.slope,
                                       barrier.intercept, barrier.level, steps, dt,
                                       below, n_paths, seed);
    else
        crossed = count_crossed_generic(model, barrier, x0, steps, dt, below, n_paths,
                                        seed);

    McEstimate est;
    est.n_paths = n_paths;
    est.count = kind == Kind::G || kind == Kind::N ? crossed : n_paths - crossed;
    est.value = crossed_share_to_value(kind, crossed, n_paths);
    est.std_err = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(n_paths));
    return est;
}

ProbabilityField estimate_field(const SdeModel& model, const BarrierSpec& barrier,
                                const GridSpec& grid, Kind kind, std::uint64_t n_paths,
                                double dt, std::uint64_t seed, int threads) {
    grid.validate();
    if (model.dim != 1)
        throw std::invalid_argument("field estimation needs a scalar model");
    const int nx = grid.nx(), nt = grid.nt();
    for (double x : {grid.x_lo, grid.x_hi})
        if (x < model.box_lo[0] || x > model.box_hi[0])
            throw std::invalid_argument("grid extends outside the model domain box");

    ProbabilityField f;
    f.grid = grid;
    f.kind = kind;
    f.provenance = Provenance::MC;
    f.lambda = model.const_drift; // label only; generic models keep their own meaning
    const std::size_t nodes = static_cast<std::size_t>(nx) * nt;
    f.values.resize(nodes);

    const int workers = resolve_threads(threads);
    parallel_chunks(nodes, nodes, workers, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t node = b; node < e; ++node) {
            const int i = static_cast<int>(node / nt), j = static_cast<int>(node % nt);
            const double x0 = grid.x(i);
            const auto est =
                estimate_point(model, barrier, std::span(&x0, 1), grid.t(j), kind,
                               n_paths, dt, derive_stream_key(seed, node));
            f.values[node] = est.value;
        }
    });
    return f;
}

ProbabilityField denoise(const ProbabilityField& in) {
    if (in.provenance != Provenance::MC)
        throw std::invalid_argument("denoise expects a raw MC field");
    in.grid.validate();
    const int nx = in.grid.nx(), nt = in.grid.nt();
    if (in.values.size() != static_cast<std::size_t>(nx) * nt)
        throw std::invalid_argument("field value count does not match its grid");

    ProbabilityField out = in;
    out.provenance = Provenance::McDenoised;
    auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j) {
            double acc = 0.0;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj)
                    acc += in.at(clampi(i + di, nx - 1), clampi(j + dj, nt - 1));
            out.at(i, j) = acc / 9.0;
        }
    return out;
}

} // namespace riskpde
