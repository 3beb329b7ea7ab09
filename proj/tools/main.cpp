// riskpde: one binary for sampling, solving, training and scoring the
// benchmark risk probabilities. Every subcommand prints a one-line JSON
// summary on stdout; diagnostics go to stderr. Exit codes: 0 success,
// 1 domain/runtime failure, 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "riskpde/analytic.hpp"
#include "riskpde/bench.hpp"
#include "riskpde/config.hpp"
#include "riskpde/fdsolve.hpp"
#include "riskpde/grid.hpp"
#include "riskpde/mc.hpp"
#include "riskpde/parallel.hpp"
#include "riskpde/pinn.hpp"
#include "riskpde/rng.hpp"
#include "riskpde/sde.hpp"

namespace {

using nlohmann::json;
using namespace riskpde;

namespace fs = std::filesystem;

// --seed beats RISKPDE_SEED beats 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("RISKPDE_SEED")) {
        try {
            std::size_t pos = 0;
            const std::uint64_t v = std::stoull(env, &pos);
            if (pos != std::string(env).size())
                throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument(
                "RISKPDE_SEED is set but is not an unsigned integer");
        }
    }
    return 0;
}

const std::set<std::string> kGridKeys = {"grid.x_lo", "grid.x_hi", "grid.dx",
                                         "grid.t_lo", "grid.t_hi", "grid.dt"};

GridSpec grid_from_config(const Config& cfg, const std::string& prefix) {
    GridSpec g;
    g.x_lo = cfg.get_real(prefix + ".x_lo");
    g.x_hi = cfg.get_real(prefix + ".x_hi");
    g.dx = cfg.get_real(prefix + ".dx");
    g.t_lo = cfg.get_real(prefix + ".t_lo");
    g.t_hi = cfg.get_real(prefix + ".t_hi");
    g.dt = cfg.get_real(prefix + ".dt");
    g.validate();
    return g;
}

std::set<std::string> grid_keys(const std::string& prefix) {
    return {prefix + ".x_lo", prefix + ".x_hi", prefix + ".dx",
            prefix + ".t_lo", prefix + ".t_hi", prefix + ".dt"};
}

std::set<std::string> operator+(std::set<std::string> a, const std::set<std::string>& b) {
    a.insert(b.begin(), b.end());
    return a;
}

const std::set<std::string> kPipeKeys = {
    "pipe.layers",        "pipe.omega_p",       "pipe.omega_d",
    "pipe.epochs",        "pipe.lr",            "pipe.lr_end_factor",
    "pipe.normalize_inputs", "pipe.history_every", "pipe.checkpoint_every"};

void apply_pipe_keys(const Config& cfg, PipeConfig& pipe) {
    if (cfg.has("pipe.layers")) {
        pipe.layer_sizes.clear();
        for (std::int64_t v : cfg.get_int_list("pipe.layers"))
            pipe.layer_sizes.push_back(static_cast<int>(v));
    }
    pipe.omega_p = cfg.get_real("pipe.omega_p", pipe.omega_p);
    pipe.omega_d = cfg.get_real("pipe.omega_d", pipe.omega_d);
    pipe.epochs = static_cast<int>(cfg.get_int("pipe.epochs", pipe.epochs));
    pipe.lr = cfg.get_real("pipe.lr", pipe.lr);
    pipe.lr_end_factor = cfg.get_real("pipe.lr_end_factor", pipe.lr_end_factor);
    pipe.normalize_inputs = cfg.get_bool("pipe.normalize_inputs", pipe.normalize_inputs);
    pipe.history_every =
        static_cast<int>(cfg.get_int("pipe.history_every", pipe.history_every));
    pipe.checkpoint_every =
        static_cast<int>(cfg.get_int("pipe.checkpoint_every", pipe.checkpoint_every));
}

void emit(const json& j) { std::cout << j.dump() << "\n"; }

struct CommonOpts {
    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::string config_path;
    std::string out;
};

void add_common(CLI::App* sub, CommonOpts& o, bool needs_config, bool needs_out) {
    auto* seed = sub->add_option("--seed", o.seed, "Seed (fallback: RISKPDE_SEED, then 0)");
    (void)seed;
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    auto* c = sub->add_option("--config", o.config_path, "Key-value config file");
    if (needs_config) c->required();
    auto* out = sub->add_option("--out", o.out, "Output path");
    if (needs_out) out->required();
}

int cmd_simulate(const CommonOpts& common, double x0, double horizon, double dt,
                 double lambda, bool augmented) {
    const std::uint64_t seed = resolve_seed(common.seed);
    const SdeModel model = benchmark_model(lambda);
    Trajectory traj;
    if (augmented) {
        const AugmentedDynamics aug = augment(model, benchmark_barrier());
        const double z0[2] = {x0 - 2.0, x0};
        traj = simulate_augmented(aug, z0, horizon, dt, seed);
    } else {
        const double x[1] = {x0};
        traj = simulate(model, x, horizon, dt, seed);
    }
    std::ofstream os(common.out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + common.out);
    traj.write_csv(os);
    emit({{"command", "simulate"},
          {"out", common.out},
          {"seed", seed},
          {"steps", traj.steps()},
          {"final", std::vector<double>(traj.state(traj.steps()).begin(),
                                        traj.state(traj.steps()).end())}});
    return 0;
}

int cmd_mc_field(const CommonOpts& common, std::optional<std::uint64_t> paths_flag,
                 std::optional<double> dt_flag, std::optional<double> lambda_flag,
                 std::optional<std::string> kind_flag) {
    const Config cfg = Config::parse_file(
        common.config_path,
        kGridKeys + std::set<std::string>{"lambda", "kind", "mc.paths", "mc.dt"});
    const GridSpec grid = grid_from_config(cfg, "grid");
    const double lambda = lambda_flag ? *lambda_flag : cfg.get_real("lambda");
    const Kind kind = parse_kind(kind_flag ? *kind_flag : cfg.get_string("kind", "N"));
    const std::uint64_t paths =
        paths_flag ? *paths_flag
                   : static_cast<std::uint64_t>(cfg.get_int("mc.paths", 1000));
    const double dt = dt_flag ? *dt_flag : cfg.get_real("mc.dt", 0.1);
    if (paths < 1) throw std::invalid_argument("paths must be >= 1");
    const std::uint64_t seed = resolve_seed(common.seed);

    const ProbabilityField f =
        estimate_field(benchmark_model(lambda), benchmark_barrier(), grid, kind, paths,
                       dt, seed, resolve_threads(common.threads));
    write_field_file(f, common.out);
    emit({{"command", "mc-field"},
          {"out", common.out},
          {"seed", seed},
          {"paths", paths},
          {"dt", dt},
          {"kind", to_string(kind)},
          {"lambda", lambda},
          {"nodes", f.values.size()}});
    return 0;
}

int cmd_fd_solve(const CommonOpts& common, std::optional<double> lambda_flag,
                 std::optional<std::string> kind_flag) {
    const Config cfg = Config::parse_file(
        common.config_path,
        kGridKeys + std::set<std::string>{"lambda", "kind", "level", "diffusion"});
    RiskPdeSpec spec;
    spec.domain = grid_from_config(cfg, "grid");
    spec.convection = lambda_flag ? *lambda_flag : cfg.get_real("lambda");
    spec.kind = parse_kind(kind_flag ? *kind_flag : cfg.get_string("kind", "N"));
    spec.level = cfg.get_real("level", 2.0);
    spec.diffusion = cfg.get_real("diffusion", 0.5);
    const FdResult res = solve(spec);
    write_field_file(res.field, common.out);
    emit({{"command", "fd-solve"},
          {"out", common.out},
          {"kind", to_string(spec.kind)},
          {"lambda", spec.convection},
          {"pre_clamp_min", res.pre_clamp_min},
          {"pre_clamp_max", res.pre_clamp_max},
          {"nodes", res.field.values.size()}});
    return 0;
}

int cmd_analytic_field(const CommonOpts& common, std::optional<double> lambda_flag,
                       bool gradient) {
    const Config cfg = Config::parse_file(common.config_path,
                                          kGridKeys + std::set<std::string>{"lambda"});
    const GridSpec grid = grid_from_config(cfg, "grid");
    const double lambda = lambda_flag ? *lambda_flag : cfg.get_real("lambda");
    std::size_t nodes = 0;
    if (gradient) {
        const GradientField g = analytic_gradient_field(grid, lambda);
        write_field_file(g, common.out);
        nodes = g.values.size();
    } else {
        const ProbabilityField f = analytic_field(grid, lambda);
        write_field_file(f, common.out);
        nodes = f.values.size();
    }
    emit({{"command", "analytic-field"},
          {"out", common.out},
          {"lambda", lambda},
          {"gradient", gradient},
          {"nodes", nodes}});
    return 0;
}

int cmd_train(const CommonOpts& common, const std::vector<std::string>& data_files,
              std::optional<int> epochs_flag) {
    const std::set<std::string> keys =
        grid_keys("data") + grid_keys("phys") + kPipeKeys +
        std::set<std::string>{"lambda_train", "mc.paths", "mc.dt"};
    const Config cfg = Config::parse_file(common.config_path, keys);
    const GridSpec phys_grid = grid_from_config(cfg, "phys");
    const std::uint64_t seed = resolve_seed(common.seed);

    std::vector<ProbabilityField> data;
    std::vector<double> lambdas;
    if (!data_files.empty()) {
        for (const auto& path : data_files) {
            data.push_back(read_field_file(path));
            lambdas.push_back(data.back().lambda);
        }
    } else {
        const GridSpec data_grid = grid_from_config(cfg, "data");
        const auto n = static_cast<std::uint64_t>(cfg.get_int("mc.paths", 1000));
        if (n < 1) throw std::invalid_argument("mc.paths must be >= 1");
        const double mc_dt = cfg.get_real("mc.dt", 0.1);
        lambdas = cfg.get_real_list("lambda_train");
        for (std::size_t li = 0; li < lambdas.size(); ++li)
            data.push_back(estimate_field(benchmark_model(lambdas[li]),
                                          benchmark_barrier(), data_grid, Kind::N, n,
                                          mc_dt, derive_stream_key(seed, li),
                                          resolve_threads(common.threads)));
    }
    if (cfg.has("lambda_train") && !data_files.empty())
        lambdas = cfg.get_real_list("lambda_train");

    PipeConfig pipe;
    apply_pipe_keys(cfg, pipe);
    if (epochs_flag) pipe.epochs = *epochs_flag;
    pipe.seed = seed;
    pipe.threads = resolve_threads(common.threads);
    // The collocation always carries the exact rows at x = 2 and T = 0, so
    // the training box must cover them whatever grids the config picked.
    double xlo = phys_grid.x_lo, xhi = std::max(phys_grid.x_hi, 2.0);
    double tlo = std::min(phys_grid.t_lo, 0.0), thi = phys_grid.t_hi;
    double llo = lambdas.front(), lhi = lambdas.front();
    for (const auto& f : data) {
        xlo = std::min(xlo, f.grid.x_lo);
        xhi = std::max(xhi, f.grid.x_hi);
        tlo = std::min(tlo, f.grid.t_lo);
        thi = std::max(thi, f.grid.t_hi);
    }
    for (double l : lambdas) {
        llo = std::min(llo, l);
        lhi = std::max(lhi, l);
    }
    pipe.x_lo = xlo;
    pipe.x_hi = xhi;
    pipe.t_lo = tlo;
    pipe.t_hi = thi;
    pipe.lambda_lo = llo;
    pipe.lambda_hi = lhi;

    const CollocationSets sets =
        make_benchmark_collocation(data, phys_grid, phys_grid, lambdas);

    fs::create_directories(common.out);
    if (data_files.empty())
        for (std::size_t li = 0; li < data.size(); ++li) {
            const std::string name =
                "data_mc_lambda" + format_double(lambdas[li]) + ".csv";
            write_field_file(data[li], (fs::path(common.out) / name).string());
        }

    const std::string cfg_hash = cfg.hash();
    const fs::path ckpt = fs::path(common.out) / "checkpoint.json";
    const auto sink = [&](int epoch, const MlpParams& p, const AdamState& a) {
        save_checkpoint_file(ckpt.string(), p, a, seed, cfg_hash);
        std::cerr << "checkpoint at epoch " << epoch << " -> " << ckpt << "\n";
    };
    const TrainResult res = train(sets, pipe, sink);
    {
        std::ofstream os(fs::path(common.out) / "history.csv", std::ios::binary);
        write_history_csv(res.history, os);
    }
    const HistoryRow& last = res.history.back();
    emit({{"command", "train"},
          {"out", common.out},
          {"seed", seed},
          {"config_hash", cfg_hash},
          {"epochs", pipe.epochs},
          {"phys_points", sets.phys_count()},
          {"data_points", sets.data_count()},
          {"final_loss", {{"total", last.total}, {"Lp", last.lp}, {"Ld", last.ld}}},
          {"checkpoint", ckpt.string()}});
    return 0;
}

int cmd_predict(const CommonOpts& common, const std::string& checkpoint,
                std::optional<double> lambda_flag) {
    const Config cfg = Config::parse_file(common.config_path,
                                          kGridKeys + std::set<std::string>{"lambda"});
    const GridSpec grid = grid_from_config(cfg, "grid");
    const double lambda = lambda_flag ? *lambda_flag : cfg.get_real("lambda");
    const Checkpoint ck = load_checkpoint_file(checkpoint);
    std::uint64_t clamped = 0;
    const ProbabilityField f = predict_field(ck.params, grid, lambda, &clamped);
    write_field_file(f, common.out);
    emit({{"command", "predict"},
          {"out", common.out},
          {"lambda", lambda},
          {"nodes", f.values.size()},
          {"clamped_nodes", clamped}});
    return 0;
}

int cmd_grad(const CommonOpts& common, const std::string& method,
             const std::string& checkpoint, const std::string& field_path,
             std::optional<double> lambda_flag) {
    GradientField g;
    if (method == "field") {
        if (field_path.empty())
            throw std::invalid_argument("--method field needs --field");
        g = gradient_field_fd(read_field_file(field_path));
    } else {
        const Config cfg = Config::parse_file(
            common.config_path, kGridKeys + std::set<std::string>{"lambda"});
        const GridSpec grid = grid_from_config(cfg, "grid");
        const double lambda = lambda_flag ? *lambda_flag : cfg.get_real("lambda");
        if (method == "analytic") {
            g = analytic_gradient_field(grid, lambda);
        } else {
            if (checkpoint.empty())
                throw std::invalid_argument("--method " + method + " needs --checkpoint");
            const Checkpoint ck = load_checkpoint_file(checkpoint);
            if (method == "ad")
                g = gradient_field_ad(ck.params, grid, lambda);
            else if (method == "fd")
                g = gradient_field_fd(ck.params, grid, lambda);
            else
                throw std::invalid_argument("unknown gradient method: " + method);
        }
    }
    write_field_file(g, common.out);
    emit({{"command", "grad"},
          {"out", common.out},
          {"method", method},
          {"nodes", g.values.size()}});
    return 0;
}

int cmd_bench(const CommonOpts& common, const std::string& name) {
    const std::uint64_t seed = resolve_seed(common.seed);
    const int threads = resolve_threads(common.threads);
    Config cfg;
    const std::set<std::string> keys =
        kPipeKeys + std::set<std::string>{"mc.paths", "mc.dt", "counts", "pipe_counts",
                                          "seeds", "run_ablation", "lambda"};
    if (!common.config_path.empty())
        cfg = Config::parse_file(common.config_path, keys);
    else
        cfg = Config::parse_text("schema = 1\n", keys);

    json summary = {{"command", "bench"}, {"name", name}, {"out", common.out},
                    {"seed", seed}};
    if (name == "generalization") {
        GeneralizationConfig g;
        g.seed = seed;
        g.lambda = cfg.get_real("lambda", g.lambda);
        g.mc_paths = static_cast<std::uint64_t>(cfg.get_int("mc.paths", g.mc_paths));
        g.mc_dt = cfg.get_real("mc.dt", g.mc_dt);
        g.run_ablation = cfg.get_bool("run_ablation", g.run_ablation);
        apply_pipe_keys(cfg, g.pipe);
        g.pipe.threads = threads;
        const GeneralizationResult r = run_generalization(g, common.out);
        summary["config_hash"] = r.config_hash;
        summary["pipe_full_mean_abs"] = r.pipe_full.mean_abs;
        summary["pipe_unseen_mean_abs"] = r.pipe_unseen.mean_abs;
        if (g.run_ablation) summary["ablation_full_mean_abs"] = r.ablation_full.mean_abs;
    } else if (name == "efficiency") {
        EfficiencyConfig e;
        e.seed = seed;
        e.lambda = cfg.get_real("lambda", e.lambda);
        e.mc_dt = cfg.get_real("mc.dt", e.mc_dt);
        if (cfg.has("counts")) {
            e.sample_counts.clear();
            for (std::int64_t v : cfg.get_int_list("counts"))
                e.sample_counts.push_back(static_cast<std::uint64_t>(v));
        }
        if (cfg.has("pipe_counts")) {
            e.pipe_counts.clear();
            for (std::int64_t v : cfg.get_int_list("pipe_counts"))
                e.pipe_counts.push_back(static_cast<std::uint64_t>(v));
        }
        e.seeds = static_cast<int>(cfg.get_int("seeds", e.seeds));
        apply_pipe_keys(cfg, e.pipe);
        e.pipe.threads = threads;
        const EfficiencyResult r = run_efficiency(e, common.out);
        summary["config_hash"] = r.config_hash;
        summary["analytic_mean_normal"] = r.analytic_mean_normal;
        summary["analytic_mean_rare"] = r.analytic_mean_rare;
        summary["rows"] = r.rows.size();
    } else if (name == "adaptation") {
        AdaptationConfig a;
        a.seed = seed;
        a.mc_paths = static_cast<std::uint64_t>(cfg.get_int("mc.paths", a.mc_paths));
        a.mc_dt = cfg.get_real("mc.dt", a.mc_dt);
        apply_pipe_keys(cfg, a.pipe);
        a.pipe.threads = threads;
        const AdaptationResult r = run_adaptation(a, common.out);
        summary["config_hash"] = r.config_hash;
        summary["mean_abs_overall"] = r.mean_abs_overall;
    } else if (name == "gradient") {
        GradientConfig gr;
        gr.training.seed = seed;
        gr.training.mc_paths =
            static_cast<std::uint64_t>(cfg.get_int("mc.paths", gr.training.mc_paths));
        gr.training.mc_dt = cfg.get_real("mc.dt", gr.training.mc_dt);
        apply_pipe_keys(cfg, gr.training.pipe);
        gr.training.pipe.threads = threads;
        const GradientResult r = run_gradient(gr, common.out);
        summary["config_hash"] = r.config_hash;
        summary["pipe_fd_mean_abs"] = r.pipe_fd.mean_abs;
        summary["mc_mean_abs"] = r.mc.mean_abs;
        summary["fd_vs_ad_max"] = r.fd_vs_ad_max;
    } else {
        throw std::invalid_argument("unknown bench name: " + name);
    }
    emit(summary);
    return 0;
}

int cmd_verify(const std::string& a_path, const std::string& b_path, double tol) {
    const ProbabilityField a = read_field_file(a_path);
    const ProbabilityField b = read_field_file(b_path);
    if (!(a.grid == b.grid)) throw std::domain_error("fields live on different grids");
    double max_abs = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k)
        max_abs = std::max(max_abs, std::abs(a.values[k] - b.values[k]));
    const bool pass = max_abs <= tol;
    emit({{"command", "verify"},
          {"a", a_path},
          {"b", b_path},
          {"tol", tol},
          {"max_abs_diff", max_abs},
          {"pass", pass}});
    return pass ? 0 : 1;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Risk/safety probability estimation toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Sample one benchmark trajectory");
    CommonOpts sim_o;
    double sim_x0 = 0.0, sim_h = 1.0, sim_dt = 0.01, sim_lambda = 1.0;
    bool sim_aug = false;
    add_common(sim, sim_o, false, true);
    sim->add_option("--x0", sim_x0, "Initial state")->required();
    sim->add_option("--horizon", sim_h, "Time horizon")->required();
    sim->add_option("--dt", sim_dt, "Step size")->required();
    sim->add_option("--lambda", sim_lambda, "Drift");
    sim->add_flag("--augmented", sim_aug, "Integrate the [phi(x), x] dynamics");

    // mc-field
    auto* mcf = app.add_subcommand("mc-field", "Monte Carlo probability field");
    CommonOpts mcf_o;
    std::optional<std::uint64_t> mcf_paths;
    std::optional<double> mcf_dt, mcf_lambda;
    std::optional<std::string> mcf_kind;
    add_common(mcf, mcf_o, true, true);
    mcf->add_option("--paths", mcf_paths, "Paths per node");
    mcf->add_option("--dt", mcf_dt, "Sampling step");
    mcf->add_option("--lambda", mcf_lambda, "Drift override");
    mcf->add_option("--kind", mcf_kind, "F, G, Q or N");

    // fd-solve
    auto* fds = app.add_subcommand("fd-solve", "Crank-Nicolson probability field");
    CommonOpts fds_o;
    std::optional<double> fds_lambda;
    std::optional<std::string> fds_kind;
    add_common(fds, fds_o, true, true);
    fds->add_option("--lambda", fds_lambda, "Drift override");
    fds->add_option("--kind", fds_kind, "F, G, Q or N");

    // analytic-field
    auto* anf = app.add_subcommand("analytic-field", "Exact probability field");
    CommonOpts anf_o;
    std::optional<double> anf_lambda;
    bool anf_grad = false;
    add_common(anf, anf_o, true, true);
    anf->add_option("--lambda", anf_lambda, "Drift override");
    anf->add_flag("--gradient", anf_grad, "Write d/dx instead of the probability");

    // train
    auto* trn = app.add_subcommand("train", "Train the probability network");
    CommonOpts trn_o;
    std::vector<std::string> trn_data;
    std::optional<int> trn_epochs;
    add_common(trn, trn_o, true, true);
    trn->add_option("--data", trn_data, "Probability field file(s) to fit instead of sampling");
    trn->add_option("--epochs", trn_epochs, "Epoch override");

    // predict
    auto* prd = app.add_subcommand("predict", "Evaluate a checkpoint on a grid");
    CommonOpts prd_o;
    std::string prd_ckpt;
    std::optional<double> prd_lambda;
    add_common(prd, prd_o, true, true);
    prd->add_option("--checkpoint", prd_ckpt, "Checkpoint JSON")->required();
    prd->add_option("--lambda", prd_lambda, "Drift override");

    // grad
    auto* grd = app.add_subcommand("grad", "Gradient field d/dx");
    CommonOpts grd_o;
    std::string grd_method = "fd", grd_ckpt, grd_field;
    std::optional<double> grd_lambda;
    add_common(grd, grd_o, false, true);
    grd->add_option("--method", grd_method, "analytic, ad, fd or field");
    grd->add_option("--checkpoint", grd_ckpt, "Checkpoint JSON (ad/fd)");
    grd->add_option("--field", grd_field, "Stored field to difference (field)");
    grd->add_option("--lambda", grd_lambda, "Drift override");

    // bench
    auto* bch = app.add_subcommand("bench", "Run a named experiment");
    CommonOpts bch_o;
    std::string bch_name;
    add_common(bch, bch_o, false, true);
    bch->add_option("name", bch_name, "generalization, efficiency, adaptation or gradient")
        ->required();

    // verify
    auto* vfy = app.add_subcommand("verify", "Compare two stored fields");
    std::string vfy_a, vfy_b;
    double vfy_tol = 1e-2;
    vfy->add_option("--a", vfy_a, "First field")->required();
    vfy->add_option("--b", vfy_b, "Second field")->required();
    vfy->add_option("--tol", vfy_tol, "Max abs tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    if (app.got_subcommand(sim))
        return cmd_simulate(sim_o, sim_x0, sim_h, sim_dt, sim_lambda, sim_aug);
    if (app.got_subcommand(mcf))
        return cmd_mc_field(mcf_o, mcf_paths, mcf_dt, mcf_lambda, mcf_kind);
    if (app.got_subcommand(fds)) return cmd_fd_solve(fds_o, fds_lambda, fds_kind);
    if (app.got_subcommand(anf)) return cmd_analytic_field(anf_o, anf_lambda, anf_grad);
    if (app.got_subcommand(trn)) return cmd_train(trn_o, trn_data, trn_epochs);
    if (app.got_subcommand(prd)) return cmd_predict(prd_o, prd_ckpt, prd_lambda);
    if (app.got_subcommand(grd))
        return cmd_grad(grd_o, grd_method, grd_ckpt, grd_field, grd_lambda);
    if (app.got_subcommand(bch)) return cmd_bench(bch_o, bch_name);
    if (app.got_subcommand(vfy)) return cmd_verify(vfy_a, vfy_b, vfy_tol);
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
