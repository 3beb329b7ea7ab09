#pragma once

// Physics-informed training of the recovery-probability surrogate
// F_hat(x, T, lambda). The loss is
//     omega_p * mean over P of r^2  +  omega_d * mean over D of (F_hat - F_bar)^2
// with the benchmark PDE residual r = dF/dT - lambda dF/dx - (1/2) d2F/dx2
// evaluated by one hyper-dual forward pass per collocation point.

#include <cstdint>
#include <functional>
#include <vector>

#include "riskpde/grid.hpp"
#include "riskpde/nn.hpp"

namespace riskpde {

struct CollocationSets {
    std::vector<double> phys; // 3 per point: x, T, lambda
    std::vector<double> data; // 4 per point: x, T, lambda, target

    std::size_t phys_count() const { return phys.size() / 3; }
    std::size_t data_count() const { return data.size() / 4; }
};

struct PipeConfig {
    std::vector<int> layer_sizes{3, 32, 32, 32, 1};
    double omega_p = 1.0;
    double omega_d = 1.0;
    int epochs = 20000; // desk-scale default; source setting is 60000
    double lr = 1e-3;
    // The step size decays geometrically from lr to lr * lr_end_factor across
    // the run; 1 keeps it constant. A constant step leaves full-batch Adam
    // bouncing around the optimum instead of settling into it.
    double lr_end_factor = 0.01;
    std::uint64_t seed = 0;
    int threads = 1;
    // Domain box; collocation points must lie inside it. Also provides the
    // affine [-1,1] input map when normalize_inputs is set.
    double x_lo = -10.0, x_hi = 2.0;
    double t_lo = 0.0, t_hi = 10.0;
    double lambda_lo = 1.0, lambda_hi = 1.0;
    bool normalize_inputs = false;
    int history_every = 100;
    int checkpoint_every = 10000;
    double divergence_limit = 1e6; // abort when total loss exceeds this
};

double residual(const MlpParams&, double x, double t, double lambda);

struct LossParts {
    double total = 0.0;
    double lp = 0.0;
    double ld = 0.0;
};

LossParts loss(const MlpParams&, const CollocationSets&, const PipeConfig&);

// d(total loss)/d(params), same layout as MlpParams::params. Summation is
// chunked with fixed boundaries and combined in chunk order, so the result
// does not depend on the thread count. Optionally reports the loss values
// of the same pass.
std::vector<double> param_grads(const MlpParams&, const CollocationSets&,
                                const PipeConfig&, LossParts* parts = nullptr);

struct HistoryRow {
    int epoch = 0;
    double total = 0.0, lp = 0.0, ld = 0.0;
};

struct TrainResult {
    MlpParams params;
    AdamState adam;
    std::vector<HistoryRow> history;
};

// Full-batch Adam from a Glorot init with the config seed. The sink, when
// given, receives the state every checkpoint_every epochs and at completion.
// Throws std::runtime_error if the loss diverges or turns non-finite.
using CheckpointSink =
    std::function<void(int epoch, const MlpParams&, const AdamState&)>;
TrainResult train(const CollocationSets&, const PipeConfig&,
                  const CheckpointSink& sink = nullptr);

void write_history_csv(const std::vector<HistoryRow>&, std::ostream&);

// Network evaluations on a grid; raw outputs are clamped to [0,1] and the
// number of clamped nodes is reported.
ProbabilityField predict_field(const MlpParams&, const GridSpec&, double lambda,
                               std::uint64_t* clamped_count = nullptr);

// dF/dx on a grid: exact hyper-dual derivative, or the centered finite
// difference (one-sided at the x edges) that mirrors how gradients are read
// off sampled fields. The params overload differences the raw network
// outputs, not the clamped field, so it agrees with the exact derivative to
// O(dx^2).
GradientField gradient_field_ad(const MlpParams&, const GridSpec&, double lambda);
GradientField gradient_field_fd(const MlpParams&, const GridSpec&, double lambda);
GradientField gradient_field_fd(const ProbabilityField&);

// Collocation assembly for the benchmark: physics points on phys_grid nodes,
// data points from the given fields (all nodes), and exact boundary/initial
// rows F(2,T)=1, F(x,0)=1(x>=2) per lambda at the bc grid's spacings.
CollocationSets make_benchmark_collocation(const std::vector<ProbabilityField>& data_fields,
                                           const GridSpec& phys_grid,
                                           const GridSpec& bc_grid,
                                           const std::vector<double>& lambdas);

} // namespace riskpde
