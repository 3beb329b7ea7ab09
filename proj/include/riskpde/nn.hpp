#pragma once

// Dense feed-forward network with tanh hidden layers and a linear scalar
// output, stored as one flat parameter vector (per layer: row-major out x in
// weights, then biases). Forward passes are templated on the scalar type so
// the same code runs on plain doubles and on HyperDual inputs.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "riskpde/ad.hpp"

namespace riskpde {

struct MlpParams {
    std::vector<int> layer_sizes; // at least {in, out}; out must be 1
    std::vector<double> params;

    int layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
    std::size_t weight_offset(int layer) const;
    std::size_t bias_offset(int layer) const;
    static std::size_t param_count(const std::vector<int>& sizes);
};

// Optional affine input map applied before layer 0, folded into layer-0
// weights/biases at init time so the stored network stays a plain MLP:
// with u_j = (in_j - offset_j) / scale_j, W'_ij = W_ij / scale_j and
// b'_i = -sum_j W_ij offset_j / scale_j.
struct InputScaling {
    std::vector<double> offset;
    std::vector<double> scale;
};

// Glorot-uniform weights (|w| <= sqrt(6/(fan_in+fan_out))), zero biases.
// Draws come from UniformStream(seed) layer by layer in storage order.
MlpParams glorot_init(const std::vector<int>& sizes, std::uint64_t seed,
                      const InputScaling* scaling = nullptr);

double forward(const MlpParams&, std::span<const double> input);

// Input (x, T, lambda) with x and T seeded as derivative directions.
HyperDual forward_hd(const MlpParams&, double x, double t, double lambda);

struct AdamState {
    std::int64_t step = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<double> m, v; // layout matches MlpParams::params

    static AdamState make(std::size_t n, double lr);
};

// One bias-corrected Adam update; deterministic, elementwise.
void adam_step(MlpParams&, std::span<const double> grad, AdamState&);

// Checkpoint: JSON object {layer_sizes, weights, biases, adam:{step,m,v,lr},
// seed, config_hash}. Weights/biases are per-layer arrays (weights row-major);
// adam.m/adam.v use the flat parameter layout.
void save_checkpoint(std::ostream&, const MlpParams&, const AdamState&,
                     std::uint64_t seed, const std::string& config_hash);
struct Checkpoint {
    MlpParams params;
    AdamState adam;
    std::uint64_t seed = 0;
    std::string config_hash;
};
Checkpoint load_checkpoint(std::istream&);
void save_checkpoint_file(const std::string& path, const MlpParams&, const AdamState&,
                          std::uint64_t seed, const std::string& config_hash);
Checkpoint load_checkpoint_file(const std::string& path);

} // namespace riskpde
