#include "riskpde/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "riskpde/analytic.hpp"
#include "riskpde/config.hpp"
#include "riskpde/mc.hpp"
#include "riskpde/rng.hpp"

namespace riskpde {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void check_same_grid(const GridSpec& a, const GridSpec& b) {
    if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

template <class FieldA, class FieldB, class Pred>
ErrorStats error_impl(const FieldA& est, const FieldB& truth, Pred include) {
    check_same_grid(est.grid, truth.grid);
    ErrorStats st;
    double abs_sum = 0.0, truth_sum = 0.0;
    const int nx = est.grid.nx(), nt = est.grid.nt();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j) {
            if (!include(est.grid.x(i), est.grid.t(j))) continue;
            const double d = std::abs(est.at(i, j) - truth.at(i, j));
            abs_sum += d;
            truth_sum += std::abs(truth.at(i, j));
            st.max_abs = std::max(st.max_abs, d);
            ++st.nodes;
        }
    if (st.nodes == 0) throw std::invalid_argument("no nodes selected for error stats");
    st.mean_abs = abs_sum / static_cast<double>(st.nodes);
    st.mean_pct = truth_sum > 0.0 ? abs_sum / truth_sum
                                  : std::numeric_limits<double>::quiet_NaN();
    return st;
}

double median_of(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of nothing");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string grid_str(const GridSpec& g) {
    std::ostringstream os;
    os << format_double(g.x_lo) << ',' << format_double(g.x_hi) << ','
       << format_double(g.dx) << ',' << format_double(g.t_lo) << ','
       << format_double(g.t_hi) << ',' << format_double(g.dt);
    return os.str();
}

std::string list_str(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

std::string list_str_u(const std::vector<std::uint64_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

// Canonical "key = value" lines, sorted; hashed the same way Config does it.
struct KvHash {
    std::vector<std::pair<std::string, std::string>> kv;

    void add(const std::string& k, const std::string& v) { kv.emplace_back(k, v); }
    void add(const std::string& k, double v) { add(k, format_double(v)); }
    void add(const std::string& k, std::uint64_t v) { add(k, std::to_string(v)); }
    void add(const std::string& k, int v) { add(k, std::to_string(v)); }
    // Not delegated: a const char* would rebind to this overload, not the
    // string one.
    void add(const std::string& k, bool v) { kv.emplace_back(k, v ? "true" : "false"); }

    void add_pipe(const PipeConfig& p) {
        std::string ls;
        for (std::size_t i = 0; i < p.layer_sizes.size(); ++i) {
            if (i) ls += ',';
            ls += std::to_string(p.layer_sizes[i]);
        }
        add("pipe.layers", ls);
        add("pipe.omega_p", p.omega_p);
        add("pipe.omega_d", p.omega_d);
        add("pipe.epochs", p.epochs);
        add("pipe.lr", p.lr);
        add("pipe.lr_end_factor", p.lr_end_factor);
        add("pipe.seed", p.seed);
        add("pipe.normalize_inputs", p.normalize_inputs);
    }

    std::string text() const {
        auto sorted = kv;
        std::sort(sorted.begin(), sorted.end());
        std::string out;
        for (const auto& [k, v] : sorted) {
            out += k;
            out += " = ";
            out += v;
            out += '\n';
        }
        return out;
    }
    std::string hash() const { return fnv1a_hex(text()); }
};

std::string field_csv_text(const ProbabilityField& f) {
    std::ostringstream os;
    write_csv(f, os);
    return os.str();
}

fs::path make_run_dir(const std::string& out_dir, const std::string& name,
                      const std::string& hash) {
    fs::path dir = fs::path(out_dir) / (name + "-" + hash);
    fs::create_directories(dir);
    return dir;
}

void write_text_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + p.string());
    os << text;
}

void write_report(const fs::path& dir, json report) {
    report["schema"] = 1;
    write_text_file(dir / "report.json", report.dump(1) + "\n");
}

json stats_json(const ErrorStats& st) {
    json j;
    j["mean_abs"] = st.mean_abs;
    j["max_abs"] = st.max_abs;
    j["mean_pct"] = st.mean_pct;
    j["nodes"] = st.nodes;
    return j;
}

// Box the training domain so it covers every grid handed to the run.
void fit_box(PipeConfig& p, std::initializer_list<const GridSpec*> grids,
             std::initializer_list<double> lambdas) {
    double xlo = 1e300, xhi = -1e300, tlo = 1e300, thi = -1e300;
    for (const GridSpec* g : grids) {
        xlo = std::min(xlo, g->x_lo);
        xhi = std::max(xhi, g->x_hi);
        tlo = std::min(tlo, g->t_lo);
        thi = std::max(thi, g->t_hi);
    }
    double llo = 1e300, lhi = -1e300;
    for (double l : lambdas) {
        llo = std::min(llo, l);
        lhi = std::max(lhi, l);
    }
    p.x_lo = xlo;
    p.x_hi = xhi;
    p.t_lo = tlo;
    p.t_hi = thi;
    p.lambda_lo = llo;
    p.lambda_hi = lhi;
}

ProbabilityField sample_data_field(double lambda, const GridSpec& grid,
                                   std::uint64_t n_paths, double dt,
                                   std::uint64_t seed, int threads) {
    const SdeModel model = benchmark_model(lambda);
    const BarrierSpec barrier = benchmark_barrier();
    return estimate_field(model, barrier, grid, Kind::N, n_paths, dt, seed,
                          threads);
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

} // namespace

ErrorStats field_error(const ProbabilityField& est, const ProbabilityField& truth) {
    return error_impl(est, truth, [](double, double) { return true; });
}

ErrorStats field_error_region(const ProbabilityField& est, const ProbabilityField& truth,
                              const RegionSpec& region, bool inside) {
    return error_impl(est, truth, [&](double x, double t) {
        return region.contains(x, t) == inside;
    });
}

double region_mean(const ProbabilityField& f, const RegionSpec& region) {
    double sum = 0.0;
    std::size_t n = 0;
    const int nx = f.grid.nx(), nt = f.grid.nt();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j)
            if (region.contains(f.grid.x(i), f.grid.t(j))) {
                sum += f.at(i, j);
                ++n;
            }
    if (n == 0) throw std::invalid_argument("region selects no nodes");
    return sum / static_cast<double>(n);
}

ErrorStats gradient_error(const GradientField& est, const GradientField& truth) {
    return error_impl(est, truth, [](double, double) { return true; });
}

GeneralizationResult run_generalization(const GeneralizationConfig& cfg,
                                        const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.data_grid.validate();
    cfg.phys_grid.validate();
    cfg.eval_grid.validate();

    KvHash h;
    h.add("experiment", std::string("generalization"));
    h.add("lambda", cfg.lambda);
    h.add("mc.paths", cfg.mc_paths);
    h.add("mc.dt", cfg.mc_dt);
    h.add("grid.data", grid_str(cfg.data_grid));
    h.add("grid.phys", grid_str(cfg.phys_grid));
    h.add("grid.eval", grid_str(cfg.eval_grid));
    h.add("seed", cfg.seed);
    h.add("run_ablation", cfg.run_ablation);
    h.add_pipe(cfg.pipe);
    const std::string hash = h.hash();
    const fs::path dir = make_run_dir(out_dir, "generalization", hash);

    const ProbabilityField data = sample_data_field(
        cfg.lambda, cfg.data_grid, cfg.mc_paths, cfg.mc_dt, cfg.seed, cfg.pipe.threads);
    const std::string data_csv = field_csv_text(data);
    write_text_file(dir / "data_mc.csv", data_csv);

    const CollocationSets sets =
        make_benchmark_collocation({data}, cfg.phys_grid, cfg.phys_grid, {cfg.lambda});

    PipeConfig pipe = cfg.pipe;
    pipe.seed = cfg.pipe.seed ? cfg.pipe.seed : cfg.seed;
    fit_box(pipe, {&cfg.data_grid, &cfg.phys_grid, &cfg.eval_grid}, {cfg.lambda});

    GeneralizationResult res;
    res.config_hash = hash;

    const TrainResult trained = train(sets, pipe);
    res.pipe_params = trained.params;
    res.history = trained.history;

    const ProbabilityField truth = analytic_field(cfg.eval_grid, cfg.lambda);
    const ProbabilityField pred = predict_field(trained.params, cfg.eval_grid, cfg.lambda);
    const RegionSpec data_box{"data", cfg.data_grid.x_lo, cfg.data_grid.x_hi,
                              cfg.data_grid.t_lo, cfg.data_grid.t_hi};
    res.pipe_full = field_error(pred, truth);
    res.pipe_unseen = field_error_region(pred, truth, data_box, false);

    {
        std::ostringstream os;
        write_history_csv(trained.history, os);
        write_text_file(dir / "history.csv", os.str());
    }
    write_text_file(dir / "pipe_field.csv", field_csv_text(pred));
    write_text_file(dir / "analytic_field.csv", field_csv_text(truth));
    save_checkpoint_file((dir / "checkpoint.json").string(), trained.params,
                         trained.adam, pipe.seed, hash);

    json report;
    report["experiment"] = "generalization";
    report["config_text"] = h.text();
    report["config_hash"] = hash;
    report["seed"] = cfg.seed;
    report["input_digests"] = {{"data_mc.csv", fnv1a_hex(data_csv)}};
    report["stats"] = {{"pipe_full", stats_json(res.pipe_full)},
                       {"pipe_unseen", stats_json(res.pipe_unseen)}};
    // Published full-scale results for this protocol; desk-scale asserts
    // relaxed bounds against them.
    report["reference_targets"] = {{"pipe_mean_abs", 0.003},
                                   {"no_physics_mean_abs", 0.015}};

    if (cfg.run_ablation) {
        PipeConfig ab = pipe;
        ab.omega_p = 0.0;
        const TrainResult abres = train(sets, ab);
        res.ablation_params = abres.params;
        const ProbabilityField abpred =
            predict_field(abres.params, cfg.eval_grid, cfg.lambda);
        res.ablation_full = field_error(abpred, truth);
        res.ablation_unseen = field_error_region(abpred, truth, data_box, false);
        write_text_file(dir / "ablation_field.csv", field_csv_text(abpred));
        report["stats"]["ablation_full"] = stats_json(res.ablation_full);
        report["stats"]["ablation_unseen"] = stats_json(res.ablation_unseen);
    }

    report["elapsed_seconds"] = elapsed_s(t0);
    write_report(dir, std::move(report));
    return res;
}

EfficiencyResult run_efficiency(const EfficiencyConfig& cfg, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.data_grid.validate();
    cfg.phys_grid.validate();
    if (cfg.seeds < 1) throw std::invalid_argument("need at least one seed");
    if (cfg.sample_counts.empty()) throw std::invalid_argument("no sample counts");

    KvHash h;
    h.add("experiment", std::string("efficiency"));
    h.add("lambda", cfg.lambda);
    h.add("counts", list_str_u(cfg.sample_counts));
    h.add("pipe_counts", list_str_u(cfg.pipe_counts));
    h.add("seeds", cfg.seeds);
    h.add("mc.dt", cfg.mc_dt);
    h.add("grid.data", grid_str(cfg.data_grid));
    h.add("grid.phys", grid_str(cfg.phys_grid));
    h.add("seed", cfg.seed);
    h.add("train_pipe", cfg.train_pipe);
    h.add_pipe(cfg.pipe);
    const std::string hash = h.hash();
    const fs::path dir = make_run_dir(out_dir, "efficiency", hash);

    EfficiencyResult res;
    res.config_hash = hash;

    const ProbabilityField truth = analytic_field(cfg.data_grid, cfg.lambda);
    res.analytic_mean_normal = region_mean(truth, cfg.normal_region);
    res.analytic_mean_rare = region_mean(truth, cfg.rare_region);

    json per_seed = json::array();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (std::size_t ci = 0; ci < cfg.sample_counts.size(); ++ci) {
        const std::uint64_t n = cfg.sample_counts[ci];
        const bool with_pipe =
            cfg.train_pipe && std::find(cfg.pipe_counts.begin(), cfg.pipe_counts.end(),
                                        n) != cfg.pipe_counts.end();
        std::vector<double> mc_n, mc_r, dn_n, dn_r, pp_n, pp_r;
        for (int s = 0; s < cfg.seeds; ++s) {
            const std::uint64_t run_seed =
                derive_stream_key(cfg.seed, ci * 1000 + static_cast<std::uint64_t>(s));
            const ProbabilityField mc = sample_data_field(
                cfg.lambda, cfg.data_grid, n, cfg.mc_dt, run_seed, cfg.pipe.threads);
            const ProbabilityField dn = denoise(mc);
            mc_n.push_back(field_error_region(mc, truth, cfg.normal_region, true).mean_pct);
            mc_r.push_back(field_error_region(mc, truth, cfg.rare_region, true).mean_pct);
            dn_n.push_back(field_error_region(dn, truth, cfg.normal_region, true).mean_pct);
            dn_r.push_back(field_error_region(dn, truth, cfg.rare_region, true).mean_pct);
            if (with_pipe) {
                const CollocationSets sets = make_benchmark_collocation(
                    {mc}, cfg.phys_grid, cfg.phys_grid, {cfg.lambda});
                PipeConfig pipe = cfg.pipe;
                pipe.seed = run_seed;
                fit_box(pipe, {&cfg.data_grid, &cfg.phys_grid}, {cfg.lambda});
                const TrainResult trained = train(sets, pipe);
                const ProbabilityField pred =
                    predict_field(trained.params, cfg.data_grid, cfg.lambda);
                pp_n.push_back(
                    field_error_region(pred, truth, cfg.normal_region, true).mean_pct);
                pp_r.push_back(
                    field_error_region(pred, truth, cfg.rare_region, true).mean_pct);
                if (s == 0) {
                    write_text_file(dir / ("pipe_field_n" + std::to_string(n) + ".csv"),
                                    field_csv_text(pred));
                    std::ostringstream os;
                    write_history_csv(trained.history, os);
                    write_text_file(dir / ("history_n" + std::to_string(n) + ".csv"),
                                    os.str());
                }
            }
            if (s == 0)
                write_text_file(dir / ("mc_field_n" + std::to_string(n) + ".csv"),
                                field_csv_text(mc));
            json row;
            row["n_paths"] = n;
            row["seed_index"] = s;
            row["mc_pct_normal"] = mc_n.back();
            row["mc_pct_rare"] = mc_r.back();
            row["denoised_pct_normal"] = dn_n.back();
            row["denoised_pct_rare"] = dn_r.back();
            row["pipe_pct_normal"] = with_pipe ? pp_n.back() : nan;
            row["pipe_pct_rare"] = with_pipe ? pp_r.back() : nan;
            per_seed.push_back(std::move(row));
        }
        EfficiencyRow row;
        row.n_paths = n;
        row.mc_pct_normal = median_of(mc_n);
        row.mc_pct_rare = median_of(mc_r);
        row.denoised_pct_normal = median_of(dn_n);
        row.denoised_pct_rare = median_of(dn_r);
        row.pipe_pct_normal = with_pipe ? median_of(pp_n) : nan;
        row.pipe_pct_rare = with_pipe ? median_of(pp_r) : nan;
        res.rows.push_back(row);
    }

    json table = json::array();
    for (const auto& r : res.rows) {
        json row;
        row["n_paths"] = r.n_paths;
        row["mc_pct_normal"] = r.mc_pct_normal;
        row["mc_pct_rare"] = r.mc_pct_rare;
        row["denoised_pct_normal"] = r.denoised_pct_normal;
        row["denoised_pct_rare"] = r.denoised_pct_rare;
        row["pipe_pct_normal"] = r.pipe_pct_normal;
        row["pipe_pct_rare"] = r.pipe_pct_rare;
        table.push_back(std::move(row));
    }

    {
        std::ostringstream os;
        os << "n_paths,mc_pct_normal,mc_pct_rare,denoised_pct_normal,denoised_pct_rare,"
              "pipe_pct_normal,pipe_pct_rare\n";
        for (const auto& r : res.rows)
            os << r.n_paths << ',' << format_double(r.mc_pct_normal) << ','
               << format_double(r.mc_pct_rare) << ','
               << format_double(r.denoised_pct_normal) << ','
               << format_double(r.denoised_pct_rare) << ','
               << format_double(r.pipe_pct_normal) << ','
               << format_double(r.pipe_pct_rare) << '\n';
        write_text_file(dir / "table.csv", os.str());
    }

    json report;
    report["experiment"] = "efficiency";
    report["config_text"] = h.text();
    report["config_hash"] = hash;
    report["seed"] = cfg.seed;
    report["analytic_mean_normal"] = res.analytic_mean_normal;
    report["analytic_mean_rare"] = res.analytic_mean_rare;
    report["medians"] = std::move(table);
    report["per_seed"] = std::move(per_seed);
    report["reference_targets"] = {{"analytic_mean_normal", 0.412},
                                   {"analytic_mean_rare", 0.985}};
    report["elapsed_seconds"] = elapsed_s(t0);
    write_report(dir, std::move(report));
    return res;
}

AdaptationResult run_adaptation(const AdaptationConfig& cfg, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.data_grid.validate();
    cfg.phys_grid.validate();
    cfg.eval_grid.validate();
    if (cfg.lambda_train.empty() || cfg.lambda_test.empty())
        throw std::invalid_argument("need train and test lambdas");
    if (cfg.lambda_phys.empty())
        throw std::invalid_argument("need physics lambdas");

    KvHash h;
    h.add("experiment", std::string("adaptation"));
    h.add("lambda_train", list_str(cfg.lambda_train));
    h.add("lambda_test", list_str(cfg.lambda_test));
    h.add("lambda_phys", list_str(cfg.lambda_phys));
    h.add("mc.paths", cfg.mc_paths);
    h.add("mc.dt", cfg.mc_dt);
    h.add("grid.data", grid_str(cfg.data_grid));
    h.add("grid.phys", grid_str(cfg.phys_grid));
    h.add("grid.eval", grid_str(cfg.eval_grid));
    h.add("seed", cfg.seed);
    h.add_pipe(cfg.pipe);
    const std::string hash = h.hash();
    const fs::path dir = make_run_dir(out_dir, "adaptation", hash);

    std::vector<ProbabilityField> data;
    json digests;
    for (std::size_t li = 0; li < cfg.lambda_train.size(); ++li) {
        data.push_back(sample_data_field(cfg.lambda_train[li], cfg.data_grid,
                                         cfg.mc_paths, cfg.mc_dt,
                                         derive_stream_key(cfg.seed, li),
                                         cfg.pipe.threads));
        const std::string csv = field_csv_text(data.back());
        const std::string name =
            "data_mc_lambda" + format_double(cfg.lambda_train[li]) + ".csv";
        write_text_file(dir / name, csv);
        digests[name] = fnv1a_hex(csv);
    }

    const CollocationSets sets =
        make_benchmark_collocation(data, cfg.phys_grid, cfg.phys_grid, cfg.lambda_phys);

    PipeConfig pipe = cfg.pipe;
    pipe.seed = cfg.pipe.seed ? cfg.pipe.seed : cfg.seed;
    // The box must cover every drift the model is trained or scored at.
    double lmin = cfg.lambda_train.front(), lmax = cfg.lambda_train.front();
    for (const auto* list : {&cfg.lambda_train, &cfg.lambda_phys, &cfg.lambda_test})
        for (double l : *list) {
            lmin = std::min(lmin, l);
            lmax = std::max(lmax, l);
        }
    fit_box(pipe, {&cfg.data_grid, &cfg.phys_grid, &cfg.eval_grid}, {lmin, lmax});

    const TrainResult trained = train(sets, pipe);

    AdaptationResult res;
    res.config_hash = hash;
    res.lambda_test = cfg.lambda_test;
    res.params = trained.params;

    json stats;
    double sum = 0.0;
    for (double lam : cfg.lambda_test) {
        const ProbabilityField truth = analytic_field(cfg.eval_grid, lam);
        const ProbabilityField pred = predict_field(trained.params, cfg.eval_grid, lam);
        const ErrorStats st = field_error(pred, truth);
        res.per_lambda.push_back(st);
        sum += st.mean_abs;
        const std::string tag = "lambda" + format_double(lam);
        stats[tag] = stats_json(st);
        write_text_file(dir / ("pipe_field_" + tag + ".csv"), field_csv_text(pred));

        // locate the worst node; the acceptance story expects it near the
        // (level, 0) corner
        double worst = -1.0;
        double wx = 0, wt = 0;
        for (int i = 0; i < cfg.eval_grid.nx(); ++i)
            for (int j = 0; j < cfg.eval_grid.nt(); ++j) {
                const double d = std::abs(pred.at(i, j) - truth.at(i, j));
                if (d > worst) {
                    worst = d;
                    wx = cfg.eval_grid.x(i);
                    wt = cfg.eval_grid.t(j);
                }
            }
        stats[tag]["worst_node"] = {{"x", wx}, {"T", wt}, {"abs_err", worst}};
    }
    res.mean_abs_overall = sum / static_cast<double>(cfg.lambda_test.size());

    {
        std::ostringstream os;
        write_history_csv(trained.history, os);
        write_text_file(dir / "history.csv", os.str());
    }
    save_checkpoint_file((dir / "checkpoint.json").string(), trained.params,
                         trained.adam, pipe.seed, hash);

    json report;
    report["experiment"] = "adaptation";
    report["config_text"] = h.text();
    report["config_hash"] = hash;
    report["seed"] = cfg.seed;
    report["input_digests"] = std::move(digests);
    report["stats"] = std::move(stats);
    report["mean_abs_overall"] = res.mean_abs_overall;
    report["reference_targets"] = {{"mean_abs_overall", 0.007}};
    report["elapsed_seconds"] = elapsed_s(t0);
    write_report(dir, std::move(report));
    return res;
}

GradientResult run_gradient(const GradientConfig& cfg, const std::string& out_dir,
                            const MlpParams* reuse) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.mc_grid.validate();
    cfg.pipe_grid.validate();
    const double lambda = cfg.training.lambda;

    KvHash h;
    h.add("experiment", std::string("gradient"));
    h.add("lambda", lambda);
    h.add("mc.paths", cfg.training.mc_paths);
    h.add("mc.dt", cfg.training.mc_dt);
    h.add("grid.mc", grid_str(cfg.mc_grid));
    h.add("grid.pipe", grid_str(cfg.pipe_grid));
    h.add("seed", cfg.training.seed);
    h.add_pipe(cfg.training.pipe);
    const std::string hash = h.hash();
    const fs::path dir = make_run_dir(out_dir, "gradient", hash);

    MlpParams params;
    if (reuse) {
        params = *reuse;
    } else {
        GeneralizationConfig tr = cfg.training;
        tr.run_ablation = false;
        params = run_generalization(tr, (dir / "training").string()).pipe_params;
    }

    GradientResult res;
    res.config_hash = hash;

    const GradientField truth_pipe = analytic_gradient_field(cfg.pipe_grid, lambda);
    const GradientField pipe_fd = gradient_field_fd(params, cfg.pipe_grid, lambda);
    const GradientField pipe_ad = gradient_field_ad(params, cfg.pipe_grid, lambda);
    res.pipe_fd = gradient_error(pipe_fd, truth_pipe);
    res.pipe_ad = gradient_error(pipe_ad, truth_pipe);
    for (std::size_t k = 0; k < pipe_fd.values.size(); ++k)
        res.fd_vs_ad_max =
            std::max(res.fd_vs_ad_max, std::abs(pipe_fd.values[k] - pipe_ad.values[k]));

    const GradientField truth_mc = analytic_gradient_field(cfg.mc_grid, lambda);
    const ProbabilityField mc_field =
        sample_data_field(lambda, cfg.mc_grid, cfg.training.mc_paths, cfg.training.mc_dt,
                          derive_stream_key(cfg.training.seed, 0x6d63), // distinct stream
                          cfg.training.pipe.threads);
    const GradientField mc_grad = gradient_field_fd(mc_field);
    res.mc = gradient_error(mc_grad, truth_mc);

    {
        std::ostringstream os;
        write_csv(pipe_fd, os);
        write_text_file(dir / "pipe_grad_fd.csv", os.str());
    }
    {
        std::ostringstream os;
        write_csv(pipe_ad, os);
        write_text_file(dir / "pipe_grad_ad.csv", os.str());
    }
    {
        std::ostringstream os;
        write_csv(mc_grad, os);
        write_text_file(dir / "mc_grad.csv", os.str());
    }
    {
        std::ostringstream os;
        write_csv(truth_pipe, os);
        write_text_file(dir / "analytic_grad.csv", os.str());
    }

    json report;
    report["experiment"] = "gradient";
    report["config_text"] = h.text();
    report["config_hash"] = hash;
    report["seed"] = cfg.training.seed;
    report["stats"] = {{"pipe_fd", stats_json(res.pipe_fd)},
                       {"pipe_ad", stats_json(res.pipe_ad)},
                       {"mc", stats_json(res.mc)},
                       {"fd_vs_ad_max", res.fd_vs_ad_max}};
    report["reference_targets"] = {{"pipe_mean_abs", 0.0006}, {"mc_mean_abs", 0.0278}};
    report["elapsed_seconds"] = elapsed_s(t0);
    write_report(dir, std::move(report));
    return res;
}

} // namespace riskpde
