#pragma once

// Benchmark experiments on the scalar drift-diffusion problem: train/estimate
// on one protocol, score against the exact field, write reports. Each run
// writes its fields (CSV), training history, and a report.json under
// out_dir/<name>-<config hash>/.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riskpde/grid.hpp"
#include "riskpde/pinn.hpp"

namespace riskpde {

struct RegionSpec {
    std::string name;
    double x_lo = 0, x_hi = 0, t_lo = 0, t_hi = 0;

    bool contains(double x, double t) const {
        return x >= x_lo - 1e-12 && x <= x_hi + 1e-12 && t >= t_lo - 1e-12 &&
               t <= t_hi + 1e-12;
    }
};

struct ErrorStats {
    double mean_abs = 0.0;
    double max_abs = 0.0;
    double mean_pct = 0.0; // mean abs error / mean true value
    std::size_t nodes = 0;
};

// Errors of `est` against `truth` on their (identical) grid; optionally
// restricted to a region or to its complement.
ErrorStats field_error(const ProbabilityField& est, const ProbabilityField& truth);
ErrorStats field_error_region(const ProbabilityField& est, const ProbabilityField& truth,
                              const RegionSpec&, bool inside);
double region_mean(const ProbabilityField&, const RegionSpec&);

ErrorStats gradient_error(const GradientField& est, const GradientField& truth);

// Generalization: train on sparse sub-region data, score on the full domain.
struct GeneralizationConfig {
    double lambda = 1.0;
    std::uint64_t mc_paths = 1000;
    double mc_dt = 0.1;
    GridSpec data_grid{-10.0, -4.0, 0.4, 0.0, 8.0, 1.0};
    GridSpec phys_grid{-10.0, 2.0, 0.2, 0.0, 10.0, 0.2};
    GridSpec eval_grid{-10.0, 2.0, 0.2, 0.0, 10.0, 0.2};
    PipeConfig pipe;
    std::uint64_t seed = 1;
    bool run_ablation = true; // also fit the omega_p = 0 baseline
};

struct GeneralizationResult {
    ErrorStats pipe_full, pipe_unseen;
    ErrorStats ablation_full, ablation_unseen;
    MlpParams pipe_params;
    MlpParams ablation_params;
    std::vector<HistoryRow> history;
    std::string config_hash;
};

GeneralizationResult run_generalization(const GeneralizationConfig&,
                                        const std::string& out_dir);

// Efficiency: full-domain data at several sample counts; scores for raw MC,
// denoised MC and (optionally) the trained network on a normal-probability
// region and a rare-event region.
struct EfficiencyConfig {
    double lambda = 1.0;
    std::vector<std::uint64_t> sample_counts{10, 100, 1000, 10000};
    // Counts at which the network is also trained (a training per count and
    // seed); other counts report NaN in the pipe columns.
    std::vector<std::uint64_t> pipe_counts{100};
    int seeds = 3; // estimates are medians over this many seeds
    double mc_dt = 0.1;
    GridSpec data_grid{-10.0, 2.0, 0.2, 0.0, 10.0, 0.1};
    GridSpec phys_grid{-10.0, 2.0, 0.2, 0.0, 10.0, 0.2};
    RegionSpec normal_region{"normal", -6.0, -2.0, 4.0, 6.0};
    RegionSpec rare_region{"rare", -2.0, 0.0, 8.0, 10.0};
    PipeConfig pipe;
    std::uint64_t seed = 1;
    bool train_pipe = true;
};

struct EfficiencyRow {
    std::uint64_t n_paths = 0;
    double mc_pct_normal = 0, mc_pct_rare = 0;
    double denoised_pct_normal = 0, denoised_pct_rare = 0;
    double pipe_pct_normal = 0, pipe_pct_rare = 0;
};

struct EfficiencyResult {
    std::vector<EfficiencyRow> rows;
    double analytic_mean_normal = 0, analytic_mean_rare = 0;
    std::string config_hash;
};

EfficiencyResult run_efficiency(const EfficiencyConfig&, const std::string& out_dir);

// Adaptation: one lambda-conditioned network trained across lambda_train,
// scored at each lambda_test against the exact field.
struct AdaptationConfig {
    std::vector<double> lambda_train{0.1, 0.5, 0.8, 1.0};
    std::vector<double> lambda_test{0.3, 0.7, 1.2, 1.5, 2.0};
    // Residual and exact-row slices span the whole drift family the model is
    // asked to cover; sampled data stays at lambda_train. Without these the
    // network is untethered past the largest training drift.
    std::vector<double> lambda_phys{0.0, 0.2, 0.4, 0.6, 0.8, 1.0,
                                    1.2, 1.4, 1.6, 1.8, 2.0};
    std::uint64_t mc_paths = 10000;
    double mc_dt = 0.1;
    GridSpec data_grid{-10.0, 2.0, 0.4, 0.0, 10.0, 0.5};
    GridSpec phys_grid{-10.0, 2.0, 0.4, 0.0, 10.0, 0.4};
    GridSpec eval_grid{-10.0, 2.0, 0.2, 0.0, 10.0, 0.2};
    PipeConfig pipe;
    std::uint64_t seed = 1;
};

struct AdaptationResult {
    std::vector<double> lambda_test;
    std::vector<ErrorStats> per_lambda;
    double mean_abs_overall = 0.0;
    MlpParams params;
    std::string config_hash;
};

AdaptationResult run_adaptation(const AdaptationConfig&, const std::string& out_dir);

// Gradient recovery: d/dx of the trained network (finite-differenced like any
// sampled field) against the exact gradient, with a raw-MC baseline.
// Comparison grids start at T = 1: the T = 0 slice is an indicator whose
// finite difference is a grid artifact, not a gradient.
struct GradientConfig {
    GeneralizationConfig training; // same protocol as the generalization run
    GridSpec mc_grid{-10.0, 2.0, 0.4, 1.0, 8.0, 1.0};   // full-domain MC baseline
    GridSpec pipe_grid{-10.0, 2.0, 0.1, 1.0, 8.0, 1.0}; // network evaluation grid
};

struct GradientResult {
    ErrorStats pipe_fd, pipe_ad, mc;
    double fd_vs_ad_max = 0.0; // max abs gap between the two network gradients
    std::string config_hash;
};

// reuse, when given, skips retraining and evaluates those parameters.
GradientResult run_gradient(const GradientConfig&, const std::string& out_dir,
                            const MlpParams* reuse = nullptr);

} // namespace riskpde
