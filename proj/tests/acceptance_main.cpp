// Acceptance gate: one numbered PASS/FAIL line per criterion, each with its
// measured value, the bound pinned here in code, and a wall-clock budget that
// is part of the criterion. Supplementary invariant checks follow as [S*]
// lines. Exit status is nonzero when anything fails.
//
// The heavy experiment criteria (6-9) run the library protocols directly; the
// reproducibility criterion (10) drives the installed binary through the
// RISKPDE_CLI environment variable, same as the CLI test suite.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "riskpde/analytic.hpp"
#include "riskpde/bench.hpp"
#include "riskpde/fdsolve.hpp"
#include "riskpde/grid.hpp"
#include "riskpde/mc.hpp"
#include "riskpde/nn.hpp"
#include "riskpde/pinn.hpp"
#include "riskpde/rng.hpp"
#include "riskpde/sde.hpp"

namespace fs = std::filesystem;
using namespace riskpde;

namespace {

// Desk-scale training lengths. The generalization criterion pins its epoch
// count; the efficiency and adaptation protocols leave it free, so these are
// chosen to fit a single core while keeping the asserted margins.
constexpr int kGeneralizationEpochs = 20000;
constexpr int kEfficiencyEpochs = 6000;
constexpr int kAdaptationEpochs = 15000;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Outcome {
    bool ok = false;
    std::string text;
};

struct Gate {
    int criteria_failed = 0;
    int checks_failed = 0;
    int index = 0;

    template <class F>
    void criterion(const char* name, double budget_s, F&& body) {
        ++index;
        std::fprintf(stderr, "[%2d] running %s (budget %gs)...\n", index, name,
                     budget_s);
        Timer t;
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o.ok = false;
            o.text = std::string("threw: ") + e.what();
        }
        const double el = t.seconds();
        std::string line = std::string(name) + ": " + o.text;
        if (el > budget_s) {
            o.ok = false;
            line += " [over budget " + num(budget_s) + "s]";
        }
        std::printf("[%2d] %s (%.1fs) %s\n", index, o.ok ? "PASS" : "FAIL", el,
                    line.c_str());
        std::fflush(stdout);
        if (!o.ok) ++criteria_failed;
    }

    template <class F>
    void check(const char* tag, const char* name, F&& body) {
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o.ok = false;
            o.text = std::string("threw: ") + e.what();
        }
        std::printf("[%s] %s %s: %s\n", tag, o.ok ? "PASS" : "FAIL", name,
                    o.text.c_str());
        std::fflush(stdout);
        if (!o.ok) ++checks_failed;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    os << text;
}

int run_cmd(const std::string& bin, const std::string& args) {
    const std::string cmd = "env -u RISKPDE_SEED " + bin + " " + args +
                            " > /dev/null 2> /dev/null";
    const int status = std::system(cmd.c_str());
    return (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
}

// -------------------------------------------------------------------------
// criterion bodies

Outcome c1_oracle_agreement() {
    const double lambdas[4] = {0.0, 0.5, 1.0, 2.0};
    double worst = 0.0;
    for (double lam : lambdas)
        for (int i = 0; i < 40; ++i)
            for (int j = 0; j < 40; ++j) {
                const double x = -9.9 + 11.8 * i / 39.0;
                const double T = 0.25 * (j + 1);
                const double gap = std::abs(closed_form_recovery(x, T, lam) -
                                            analytic_recovery(x, T, lam));
                worst = std::max(worst, gap);
            }
    return {worst < 1e-6,
            "max gap between the two exact routes " + num(worst) + " (bound 1e-06)"};
}

// Max abs error against the closed form on the benchmark box, excluding only
// the 3-cell neighborhood of the (x=2, T=0) corner at the grid's own spacing.
// Known outcome at these settings: the far wall imposes zero flux where the
// exact solution still carries about 0.11 of it, leaving a resolution-stable
// boundary layer (about 5e-2 at the wall node, above 1e-2 for x < -9.3), and
// the startup layer exceeds 1e-2 out to roughly 10 cells from the corner. The
// bound below is therefore expected to fail; the test reports the measured
// anatomy rather than papering over it. See docs/numerics.md.
Outcome c2_solver_convergence() {
    struct LevelErr {
        double worst;
        double wx, wt;   // argmax location
        double wall;     // error at the far-wall node, final row
        double interior; // x in [-6, 0], the region the experiments use
    };
    const auto level_error = [](double dx, double dt) {
        RiskPdeSpec spec;
        spec.kind = Kind::N;
        spec.level = 2.0;
        spec.convection = 1.0;
        spec.diffusion = 0.5;
        spec.domain = {-10.0, 2.0, dx, 0.0, 10.0, dt};
        const FdResult res = solve(spec);
        const ProbabilityField exact = analytic_field(spec.domain, 1.0);
        LevelErr e{0.0, 0.0, 0.0, 0.0, 0.0};
        const int nx = spec.domain.nx(), nt = spec.domain.nt();
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nt; ++j) {
                const double d = std::abs(res.field.at(i, j) - exact.at(i, j));
                const double x = spec.domain.x(i), T = spec.domain.t(j);
                if (x >= -6.0 && x <= 0.0) e.interior = std::max(e.interior, d);
                // 3-cell corner block at the stated resolution, kept at the
                // same physical size on the halved grid so the refinement
                // ratio compares fixed locations.
                if (x >= 2.0 - 3 * 0.02 - 1e-12 && T <= 3 * 0.005 + 1e-12) continue;
                if (d > e.worst) {
                    e.worst = d;
                    e.wx = x;
                    e.wt = T;
                }
            }
        e.wall = std::abs(res.field.at(0, nt - 1) - exact.at(0, nt - 1));
        return e;
    };
    const LevelErr coarse = level_error(0.02, 0.005);
    const LevelErr fine = level_error(0.01, 0.0025);
    const double ratio = coarse.worst / fine.worst;
    const bool ok = coarse.worst < 1e-2 && ratio >= 2.0;
    return {ok, "max abs error " + num(coarse.worst) + " at (" + num(coarse.wx) + "," +
                    num(coarse.wt) + ") vs bound 0.01, halving steps shrinks it " +
                    num(ratio) + "x (need 2x); wall-node gap " + num(coarse.wall) +
                    " -> " + num(fine.wall) + " (truncation, does not converge), " +
                    "interior x in [-6,0] max " + num(coarse.interior)};
}

Outcome c3_sampler_hits_known_values() {
    const double x0[1] = {0.0};
    const McEstimate a =
        estimate_point(benchmark_model(1.0), benchmark_barrier(), x0, 10.0, Kind::N,
                       100000, 1e-3, 101);
    const McEstimate b =
        estimate_point(benchmark_model(0.0), benchmark_barrier(), x0, 4.0, Kind::N,
                       100000, 1e-4, 102);
    const double gap_a = std::abs(a.value - 0.99834);
    const double gap_b = std::abs(b.value - 0.31731);
    const bool ok = gap_a <= 3.0 * a.std_err && gap_b <= 3.0 * b.std_err;
    return {ok, "drift 1, T=10: " + num(a.value) + " vs 0.99834 (|diff| " + num(gap_a) +
                    " <= 3se " + num(3.0 * a.std_err) + "); drift 0, T=4: " +
                    num(b.value) + " vs 0.31731 (|diff| " + num(gap_b) + " <= 3se " +
                    num(3.0 * b.std_err) + ")"};
}

Outcome c4_derivative_lanes() {
    double worst1 = 0.0, worst2 = 0.0;
    for (int k = 0; k < 20; ++k) {
        const MlpParams p = glorot_init({3, 16, 16, 1}, 1000 + k);
        UniformStream u(500 + k);
        const double x = -10.0 + 12.0 * u.next();
        const double t = 0.5 + 9.5 * u.next();
        const double lam = 2.0 * u.next();
        const HyperDual hd = forward_hd(p, x, t, lam);
        const auto f = [&](double xx, double tt) {
            const double in[3] = {xx, tt, lam};
            return forward(p, in);
        };
        const double hx = 1e-6 * std::max(1.0, std::abs(x));
        const double ht = 1e-6 * std::max(1.0, std::abs(t));
        const double fdx = (f(x + hx, t) - f(x - hx, t)) / (2.0 * hx);
        const double fdt = (f(x, t + ht) - f(x, t - ht)) / (2.0 * ht);
        const double h2 = 1e-4;
        const double fdxx = (f(x + h2, t) - 2.0 * f(x, t) + f(x - h2, t)) / (h2 * h2);
        // The 1e-3 floors turn the relative bounds into matching absolute
        // precision where a derivative happens to vanish.
        worst1 = std::max(worst1, std::abs(hd.dx - fdx) / std::max(std::abs(fdx), 1e-3));
        worst1 = std::max(worst1, std::abs(hd.dt - fdt) / std::max(std::abs(fdt), 1e-3));
        worst2 =
            std::max(worst2, std::abs(hd.dxx - fdxx) / std::max(std::abs(fdxx), 1e-3));
    }
    const bool ok = worst1 < 1e-6 && worst2 < 1e-4;
    return {ok, "20 random networks: worst first-derivative rel err " + num(worst1) +
                    " (bound 1e-06), second " + num(worst2) + " (bound 1e-04)"};
}

Outcome c5_loss_gradient() {
    PipeConfig cfg;
    cfg.x_lo = -10.0;
    cfg.x_hi = 2.0;
    cfg.t_lo = 0.0;
    cfg.t_hi = 10.0;
    cfg.lambda_lo = 0.0;
    cfg.lambda_hi = 2.0;

    UniformStream u(77);
    CollocationSets sets;
    for (int i = 0; i < 60; ++i) {
        sets.phys.push_back(-10.0 + 12.0 * u.next());
        sets.phys.push_back(10.0 * u.next());
        sets.phys.push_back(2.0 * u.next());
    }
    for (int i = 0; i < 60; ++i) {
        const double x = -10.0 + 12.0 * u.next();
        const double t = 10.0 * u.next();
        const double lam = 2.0 * u.next();
        sets.data.push_back(x);
        sets.data.push_back(t);
        sets.data.push_back(lam);
        sets.data.push_back(closed_form_recovery(x, t, lam));
    }

    MlpParams p = glorot_init(cfg.layer_sizes, 11);
    const std::vector<double> g = param_grads(p, sets, cfg);
    double worst = 0.0;
    for (int c = 0; c < 100; ++c) {
        const auto idx =
            static_cast<std::size_t>(u.next() * static_cast<double>(p.params.size()));
        const double orig = p.params[idx];
        const double h = 1e-6 * std::max(1.0, std::abs(orig));
        p.params[idx] = orig + h;
        const double up = loss(p, sets, cfg).total;
        p.params[idx] = orig - h;
        const double dn = loss(p, sets, cfg).total;
        p.params[idx] = orig;
        const double fd = (up - dn) / (2.0 * h);
        worst = std::max(worst,
                         std::abs(g[idx] - fd) / std::max(std::abs(fd), 1e-4));
    }
    return {worst < 1e-5, "100 random coordinates: worst rel err vs central "
                          "differences " +
                              num(worst) + " (bound 1e-05)"};
}

Outcome c10_invariants(const fs::path& art) {
    // (a) complementary kinds from the solver partition to 1
    const auto pair_gap = [](const GridSpec& domain, Kind first, Kind second) {
        RiskPdeSpec spec;
        spec.level = 2.0;
        spec.convection = 1.0;
        spec.diffusion = 0.5;
        spec.domain = domain;
        spec.kind = first;
        const FdResult a = solve(spec);
        spec.kind = second;
        const FdResult b = solve(spec);
        double worst = 0.0;
        for (std::size_t k = 0; k < a.field.values.size(); ++k)
            worst = std::max(
                worst, std::abs(a.field.values[k] + b.field.values[k] - 1.0));
        return worst;
    };
    const double gap_fg = pair_gap({2.0, 8.0, 0.05, 0.0, 4.0, 0.02}, Kind::F, Kind::G);
    const double gap_qn = pair_gap({-8.0, 2.0, 0.05, 0.0, 4.0, 0.02}, Kind::Q, Kind::N);
    const bool partitions_ok = gap_fg < 1e-6 && gap_qn < 1e-6;

    // (b) the exact probability is monotone in horizon and in state
    bool monotone = true;
    for (double lam : {0.0, 1.0, 2.0})
        for (int i = 0; i < 40 && monotone; ++i)
            for (int j = 1; j <= 40 && monotone; ++j) {
                const double x = -9.9 + 11.8 * i / 39.0;
                const double T = 0.25 * j;
                const double v = closed_form_recovery(x, T, lam);
                if (closed_form_recovery(x, T + 0.25, lam) < v - 1e-12) monotone = false;
                if (closed_form_recovery(x + 0.05, T, lam) < v - 1e-12) monotone = false;
            }

    // (c) the exact field sits on the dynamics: centered residual on fine
    // grids (away from the T = 0 kink) stays below 1e-3
    double worst_res = 0.0;
    for (double lam : {0.5, 1.0}) {
        const GridSpec g{-6.0, 0.0, 0.02, 1.0, 5.0, 0.02};
        RiskPdeSpec spec;
        spec.kind = Kind::N;
        spec.level = 2.0;
        spec.convection = lam;
        spec.diffusion = 0.5;
        spec.domain = g;
        worst_res = std::max(worst_res, residual_check(analytic_field(g, lam), spec));
    }
    const bool residual_ok = worst_res < 1e-3;

    // (d) every seeded command reproduces byte for byte
    int diffs = -1;
    std::string repro_note;
    if (const char* bin_env = std::getenv("RISKPDE_CLI")) {
        const std::string bin = bin_env;
        const fs::path d = art / "c10";
        fs::create_directories(d);
        diffs = 0;

        const auto twice = [&](const std::string& args_a, const std::string& args_b,
                               const fs::path& file_a, const fs::path& file_b,
                               const char* what) {
            if (run_cmd(bin, args_a) != 0 || run_cmd(bin, args_b) != 0) {
                ++diffs;
                repro_note += std::string(" ") + what + ":failed";
                return;
            }
            if (slurp(file_a) != slurp(file_b) || slurp(file_a).empty()) {
                ++diffs;
                repro_note += std::string(" ") + what + ":differs";
            }
        };

        const fs::path t1 = d / "sim_a.csv", t2 = d / "sim_b.csv";
        const std::string sim = "simulate --x0 0 --horizon 1 --dt 0.05 --lambda 1 "
                                "--seed 9 --out ";
        twice(sim + t1.string(), sim + t2.string(), t1, t2, "simulate");

        const fs::path cfg = d / "field.cfg";
        write_text(cfg,
                   "schema = 1\n"
                   "grid.x_lo = -2\ngrid.x_hi = 2\ngrid.dx = 0.5\n"
                   "grid.t_lo = 0\ngrid.t_hi = 1\ngrid.dt = 0.25\n"
                   "lambda = 1\n");
        const fs::path m1 = d / "mc_a.csv", m2 = d / "mc_b.csv";
        const std::string mc = "mc-field --config " + cfg.string() +
                               " --paths 60 --dt 0.05 --seed 3 --out ";
        twice(mc + m1.string(), mc + m2.string(), m1, m2, "mc-field");

        const fs::path tcfg = d / "train.cfg";
        write_text(tcfg,
                   "schema = 1\n"
                   "phys.x_lo = -2\nphys.x_hi = 2\nphys.dx = 1\n"
                   "phys.t_lo = 0\nphys.t_hi = 1\nphys.dt = 0.5\n"
                   "data.x_lo = -2\ndata.x_hi = 0\ndata.dx = 1\n"
                   "data.t_lo = 0\ndata.t_hi = 1\ndata.dt = 0.5\n"
                   "lambda_train = 1\nmc.paths = 30\nmc.dt = 0.1\n"
                   "pipe.layers = 3, 8, 1\npipe.epochs = 40\n"
                   "pipe.history_every = 10\npipe.checkpoint_every = 20\n");
        const fs::path tr1 = d / "train_a", tr2 = d / "train_b";
        const std::string tr = "train --config " + tcfg.string() + " --seed 11 --out ";
        if (run_cmd(bin, tr + tr1.string()) != 0 ||
            run_cmd(bin, tr + tr2.string()) != 0) {
            ++diffs;
            repro_note += " train:failed";
        } else {
            for (const char* f : {"checkpoint.json", "history.csv",
                                  "data_mc_lambda1.csv"})
                if (slurp(tr1 / f) != slurp(tr2 / f) || slurp(tr1 / f).empty()) {
                    ++diffs;
                    repro_note += std::string(" train/") + f + ":differs";
                }
        }

        const fs::path bcfg = d / "bench.cfg";
        write_text(bcfg,
                   "schema = 1\nmc.paths = 50\nrun_ablation = false\n"
                   "pipe.layers = 3, 8, 1\npipe.epochs = 30\n"
                   "pipe.history_every = 10\npipe.checkpoint_every = 30\n");
        const fs::path b1 = d / "bench_a", b2 = d / "bench_b";
        const std::string bench = "bench generalization --config " + bcfg.string() +
                                  " --seed 2 --out ";
        if (run_cmd(bin, bench + b1.string()) != 0 ||
            run_cmd(bin, bench + b2.string()) != 0 || !fs::exists(b1) ||
            fs::begin(fs::directory_iterator(b1)) == fs::end(fs::directory_iterator(b1))) {
            ++diffs;
            repro_note += " bench:failed";
        } else {
            // report.json carries wall-clock time; everything else must match.
            const fs::path run1 = fs::directory_iterator(b1)->path();
            const fs::path run2 = b2 / run1.filename();
            int compared = 0;
            for (const auto& entry : fs::directory_iterator(run1)) {
                if (!entry.is_regular_file()) continue;
                const std::string name = entry.path().filename().string();
                if (name == "report.json") continue;
                ++compared;
                if (slurp(entry.path()) != slurp(run2 / name)) {
                    ++diffs;
                    repro_note += " bench/" + name + ":differs";
                }
            }
            if (compared == 0) {
                ++diffs;
                repro_note += " bench:empty";
            }
        }
    } else {
        repro_note = " RISKPDE_CLI not set";
    }
    const bool repro_ok = diffs == 0;

    const bool ok = partitions_ok && monotone && residual_ok && repro_ok;
    return {ok, "partition gaps " + num(gap_fg) + "/" + num(gap_qn) +
                    " (bound 1e-06), monotone " + (monotone ? "yes" : "NO") +
                    ", exact-field residual " + num(worst_res) +
                    " (bound 0.001), repeat-run mismatches " +
                    (diffs < 0 ? std::string("unchecked") : std::to_string(diffs)) +
                    repro_note};
}

} // namespace

int main() {
    std::printf("acceptance gate: 10 criteria, then supplementary checks\n");
    std::fflush(stdout);

    const fs::path art = fs::temp_directory_path() / "riskpde-acceptance";
    fs::remove_all(art);
    fs::create_directories(art);

    Gate gate;
    std::optional<GeneralizationResult> gen;
    std::optional<EfficiencyResult> eff;
    std::optional<AdaptationResult> adapt;
    std::optional<GradientResult> grad;
    GeneralizationConfig gen_cfg;

    gate.criterion("closed form and quadrature agree", 5.0, c1_oracle_agreement);
    gate.criterion("solver matches the exact field and converges", 60.0,
                   c2_solver_convergence);
    gate.criterion("sampler hits the known values", 120.0,
                   c3_sampler_hits_known_values);
    gate.criterion("carried derivatives match finite differences", 5.0,
                   c4_derivative_lanes);
    gate.criterion("loss gradient matches finite differences", 30.0, c5_loss_gradient);

    gate.criterion("generalization from sparse data", 1800.0, [&]() -> Outcome {
        gen_cfg.pipe.epochs = kGeneralizationEpochs;
        gen = run_generalization(gen_cfg, (art / "generalization").string());
        const double full = gen->pipe_full.mean_abs;
        const double ab = gen->ablation_full.mean_abs;
        const bool ok = full < 2e-2 && full < ab;
        return {ok, "full-domain mean abs " + num(full) +
                        " (bound 0.02), data-only ablation " + num(ab) +
                        " (must be worse)"};
    });

    gate.criterion("trained field beats smoothed sampling at 100 paths", 2700.0,
                   [&]() -> Outcome {
        EfficiencyConfig e;
        e.pipe.epochs = kEfficiencyEpochs;
        eff = run_efficiency(e, (art / "efficiency").string());
        const EfficiencyRow* row = nullptr;
        for (const auto& r : eff->rows)
            if (r.n_paths == 100) row = &r;
        if (!row) return {false, "no 100-path row in the results"};
        const bool ok = row->pipe_pct_normal < row->denoised_pct_normal &&
                        row->denoised_pct_normal < row->mc_pct_normal &&
                        row->pipe_pct_rare < row->denoised_pct_rare &&
                        row->denoised_pct_rare < row->mc_pct_rare;
        return {ok, "median pct err normal " + num(row->pipe_pct_normal) + " < " +
                        num(row->denoised_pct_normal) + " < " +
                        num(row->mc_pct_normal) + "; rare " +
                        num(row->pipe_pct_rare) + " < " + num(row->denoised_pct_rare) +
                        " < " + num(row->mc_pct_rare)};
    });

    gate.criterion("one network covers unseen drift values", 2700.0, [&]() -> Outcome {
        AdaptationConfig a;
        a.pipe.epochs = kAdaptationEpochs;
        adapt = run_adaptation(a, (art / "adaptation").string());
        return {adapt->mean_abs_overall < 3e-2,
                "mean abs over held-out drifts " + num(adapt->mean_abs_overall) +
                    " (bound 0.03)"};
    });

    gate.criterion("trained field improves gradient recovery", 300.0,
                   [&]() -> Outcome {
        if (!gen) return {false, "generalization training unavailable"};
        GradientConfig gr;
        gr.training = gen_cfg;
        grad = run_gradient(gr, (art / "gradient").string(), &gen->pipe_params);
        const double pipe = grad->pipe_fd.mean_abs;
        const double mc = grad->mc.mean_abs;
        return {pipe * 5.0 <= mc, "network gradient mean abs " + num(pipe) +
                                      ", sampled baseline " + num(mc) +
                                      " (need 5x smaller)"};
    });

    gate.criterion("invariants hold and seeded runs reproduce", 120.0,
                   [&] { return c10_invariants(art); });

    // ---------------------------------------------------------------- S checks

    // A slow geometric creep is normal for Adam this deep into training; what
    // would invalidate the reported numbers is a tail that oscillates or blows
    // up, or a loss that never descended in the first place.
    gate.check("S1", "training descended and its tail is stable", [&]() -> Outcome {
        if (!gen) return {false, "no training history"};
        const auto& hist = gen->history;
        if (hist.size() < 8) return {false, "history too short"};
        const double first = hist.front().total;
        const double last = hist.back().total;
        double tail_min = last;
        for (std::size_t k = hist.size() - hist.size() / 4; k < hist.size(); ++k)
            tail_min = std::min(tail_min, hist[k].total);
        const bool descended = last < 1e-2 * first;
        const bool stable = last <= 1.5 * tail_min;
        return {descended && stable,
                "loss fell " + num(first) + " -> " + num(last) +
                    " (need 100x), final value within 1.5x of the last-quarter minimum " +
                    num(tail_min)};
    });

    gate.check("S2", "network recovery + solver non-recovery sum to 1", [&]() -> Outcome {
        if (!gen) return {false, "no trained network"};
        const GridSpec g = gen_cfg.eval_grid;
        RiskPdeSpec spec;
        spec.kind = Kind::Q;
        spec.level = 2.0;
        spec.convection = gen_cfg.lambda;
        spec.diffusion = 0.5;
        spec.domain = g;
        const FdResult q = solve(spec);
        const ProbabilityField n = predict_field(gen->pipe_params, g, gen_cfg.lambda);
        double sum = 0.0;
        for (std::size_t k = 0; k < n.values.size(); ++k)
            sum += std::abs(n.values[k] + q.field.values[k] - 1.0);
        const double mean = sum / static_cast<double>(n.values.size());
        return {mean < 2e-2, "mean |N + Q - 1| = " + num(mean) + " (bound 0.02)"};
    });

    gate.check("S3", "network pins the barrier value", [&]() -> Outcome {
        if (!gen) return {false, "no trained network"};
        const GridSpec g = gen_cfg.eval_grid;
        const ProbabilityField n = predict_field(gen->pipe_params, g, gen_cfg.lambda);
        double worst = 1.0;
        for (int j = 0; j < g.nt(); ++j) worst = std::min(worst, n.at(g.nx() - 1, j));
        return {worst >= 0.95, "min value on the x = 2 edge " + num(worst) +
                                   " (bound 0.95, exact value 1)"};
    });

    gate.check("S4", "both network gradient routes agree", [&]() -> Outcome {
        if (!grad) return {false, "no gradient run"};
        return {grad->fd_vs_ad_max < 1e-2,
                "max gap between differenced and carried gradients " +
                    num(grad->fd_vs_ad_max) + " (bound 0.01)"};
    });

    gate.check("S5", "score regions sit at their published means", [&]() -> Outcome {
        if (!eff) return {false, "no efficiency run"};
        const double dn = std::abs(eff->analytic_mean_normal - 0.412);
        const double dr = std::abs(eff->analytic_mean_rare - 0.985);
        return {dn < 0.01 && dr < 0.01,
                "normal region mean " + num(eff->analytic_mean_normal) +
                    " (ref 0.412), rare " + num(eff->analytic_mean_rare) +
                    " (ref 0.985)"};
    });

    gate.check("S6", "sampling error shrinks with more paths", [&]() -> Outcome {
        if (!eff) return {false, "no efficiency run"};
        const EfficiencyRow *lo = nullptr, *hi = nullptr;
        for (const auto& r : eff->rows) {
            if (r.n_paths == 10) lo = &r;
            if (r.n_paths == 10000) hi = &r;
        }
        if (!lo || !hi) return {false, "rows missing"};
        const bool ok = hi->mc_pct_normal < lo->mc_pct_normal &&
                        hi->mc_pct_rare < lo->mc_pct_rare;
        return {ok, "pct err normal " + num(hi->mc_pct_normal) + " < " +
                        num(lo->mc_pct_normal) + ", rare " + num(hi->mc_pct_rare) +
                        " < " + num(lo->mc_pct_rare)};
    });

    const int failed = gate.criteria_failed + gate.checks_failed;
    std::printf("RESULT: %d/10 criteria passed, %d/6 supplementary checks passed\n",
                10 - gate.criteria_failed, 6 - gate.checks_failed);
    std::printf("artifacts: %s\n", art.string().c_str());
    return failed == 0 ? 0 : 1;
}
