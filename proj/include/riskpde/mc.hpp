#pragma once

// Monte Carlo estimation of the four event probabilities from sampled paths.
// Events are detected on the discrete time grid only (no bridge correction
// between samples), which carries an O(sqrt(dt)) bias toward missing
// crossings; dt is therefore a config knob, not a constant.

#include <cstdint>

#include "riskpde/grid.hpp"
#include "riskpde/sde.hpp"

namespace riskpde {

struct McEstimate {
    double value = 0.0;   // count / n_paths, exactly
    double std_err = 0.0; // sqrt(value * (1 - value) / n_paths)
    std::uint64_t count = 0;
    std::uint64_t n_paths = 0;
};

// Probability of the `kind` event by `horizon` from x0. Path p draws from
// NormalStream(seed, p), so estimates for complementary kinds (F/G, Q/N) with
// equal seeds see identical paths and sum to 1 exactly.
McEstimate estimate_point(const SdeModel&, const BarrierSpec&,
                          std::span<const double> x0, double horizon, Kind kind,
                          std::uint64_t n_paths, double dt, std::uint64_t seed);

// One estimate_point per grid node with the node's own stream key
// derive_stream_key(seed, node index); results are independent of thread
// count and scheduling. Scalar models only.
ProbabilityField estimate_field(const SdeModel&, const BarrierSpec&, const GridSpec&,
                                Kind kind, std::uint64_t n_paths, double dt,
                                std::uint64_t seed, int threads = 1);

// 3x3 uniform moving average with replicate padding at the edges.
ProbabilityField denoise(const ProbabilityField&);

} // namespace riskpde
