#include "riskpde/pinn.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "riskpde/parallel.hpp"

namespace riskpde {

namespace {

// Gradient sums are cut into this many chunks with boundaries depending only
// on the point count; chunk results combine in index order, so the gradient
// is independent of the thread count.
constexpr std::size_t kGradChunks = 64;

void check_network(const MlpParams& p) {
    if (p.layer_sizes.size() < 2 || p.layer_sizes.front() != 3 ||
        p.layer_sizes.back() != 1)
        throw std::invalid_argument("network must map (x, T, lambda) to a scalar");
    if (p.params.size() != MlpParams::param_count(p.layer_sizes))
        throw std::invalid_argument("parameter vector does not match layer sizes");
}

void check_sets(const CollocationSets& sets, const PipeConfig& cfg) {
    if (sets.phys.size() % 3 != 0)
        throw std::invalid_argument("physics set must be flat (x, T, lambda) triples");
    if (sets.data.size() % 4 != 0)
        throw std::invalid_argument("data set must be flat (x, T, lambda, target) rows");
    if (sets.phys.empty() && sets.data.empty())
        throw std::invalid_argument("no collocation points");
    if (cfg.omega_p > 0.0 && sets.phys.empty())
        throw std::invalid_argument("physics set is empty but omega_p > 0");
    if (cfg.omega_d > 0.0 && sets.data.empty())
        throw std::invalid_argument("data set is empty but omega_d > 0");
}

// Tape for one collocation point: activations of every layer boundary in the
// four carried lanes (value, d/dx, d/dT, d2/dx2), plus the pre-activation
// derivative lanes of each hidden layer, which the second-derivative reverse
// rules need.
struct Tape {
    std::vector<std::vector<double>> hv, hp, hq, hw; // per boundary 0..L
    std::vector<std::vector<double>> zp, zq, zw;     // per hidden layer
    std::vector<double> bv, bp, bq, bw;              // reverse lane buffers
    std::vector<double> cv, cp, cq, cw;

    explicit Tape(const std::vector<int>& sizes) {
        const std::size_t L = sizes.size() - 1;
        hv.resize(L + 1);
        hp.resize(L + 1);
        hq.resize(L + 1);
        hw.resize(L + 1);
        for (std::size_t b = 0; b <= L; ++b) {
            hv[b].resize(sizes[b]);
            hp[b].resize(sizes[b]);
            hq[b].resize(sizes[b]);
            hw[b].resize(sizes[b]);
        }
        zp.resize(L - 1);
        zq.resize(L - 1);
        zw.resize(L - 1);
        for (std::size_t l = 0; l + 1 < L; ++l) {
            zp[l].resize(sizes[l + 1]);
            zq[l].resize(sizes[l + 1]);
            zw[l].resize(sizes[l + 1]);
        }
        int widest = 0;
        for (int s : sizes) widest = std::max(widest, s);
        bv.resize(widest);
        bp.resize(widest);
        bq.resize(widest);
        bw.resize(widest);
        cv.resize(widest);
        cp.resize(widest);
        cq.resize(widest);
        cw.resize(widest);
    }
};

// Forward pass with (x, T) derivative lanes, leaving everything the reverse
// pass needs in the tape. Returns the scalar output lanes.
struct OutLanes {
    double v, p, q, w;
};

OutLanes forward_tape(const MlpParams& net, double x, double t, double lambda,
                      Tape& tp) {
    const auto& sizes = net.layer_sizes;
    const int L = net.layers();
    tp.hv[0][0] = x;
    tp.hv[0][1] = t;
    tp.hv[0][2] = lambda;
    tp.hp[0] = {1.0, 0.0, 0.0};
    tp.hq[0] = {0.0, 1.0, 0.0};
    tp.hw[0] = {0.0, 0.0, 0.0};
    for (int l = 0; l < L; ++l) {
        const int in = sizes[l], out = sizes[l + 1];
        const double* W = net.params.data() + net.weight_offset(l);
        const double* b = net.params.data() + net.bias_offset(l);
        const double* pv = tp.hv[l].data();
        const double* pp = tp.hp[l].data();
        const double* pq = tp.hq[l].data();
        const double* pw = tp.hw[l].data();
        for (int o = 0; o < out; ++o) {
            const double* row = W + static_cast<std::size_t>(o) * in;
            double zv = b[o], zpv = 0.0, zqv = 0.0, zwv = 0.0;
            for (int i = 0; i < in; ++i) {
                const double w = row[i];
                zv += w * pv[i];
                zpv += w * pp[i];
                zqv += w * pq[i];
                zwv += w * pw[i];
            }
            if (l + 1 < L) {
                const double tv = std::tanh(zv);
                const double s = 1.0 - tv * tv;
                tp.zp[l][o] = zpv;
                tp.zq[l][o] = zqv;
                tp.zw[l][o] = zwv;
                tp.hv[l + 1][o] = tv;
                tp.hp[l + 1][o] = s * zpv;
                tp.hq[l + 1][o] = s * zqv;
                tp.hw[l + 1][o] = s * zwv - 2.0 * tv * s * zpv * zpv;
            } else {
                tp.hv[l + 1][o] = zv;
                tp.hp[l + 1][o] = zpv;
                tp.hq[l + 1][o] = zqv;
                tp.hw[l + 1][o] = zwv;
            }
        }
    }
    return {tp.hv[L][0], tp.hp[L][0], tp.hq[L][0], tp.hw[L][0]};
}

// Reverse pass seeded with adjoints of the four output lanes; accumulates
// d(seeded scalar)/d(params) into grad.
void reverse_tape(const MlpParams& net, Tape& tp, OutLanes seed, double* grad) {
    const auto& sizes = net.layer_sizes;
    const int L = net.layers();
    // lane adjoints of the current boundary's activations
    std::vector<double>& av = tp.bv;
    std::vector<double>& ap = tp.bp;
    std::vector<double>& aq = tp.bq;
    std::vector<double>& aw = tp.bw;
    std::vector<double>& nv = tp.cv;
    std::vector<double>& np = tp.cp;
    std::vector<double>& nq = tp.cq;
    std::vector<double>& nw = tp.cw;
    av[0] = seed.v;
    ap[0] = seed.p;
    aq[0] = seed.q;
    aw[0] = seed.w;
    for (int l = L - 1; l >= 0; --l) {
        const int in = sizes[l], out = sizes[l + 1];
        const double* W = net.params.data() + net.weight_offset(l);
        double* gW = grad + net.weight_offset(l);
        double* gb = grad + net.bias_offset(l);
        const double* pv = tp.hv[l].data();
        const double* pp = tp.hp[l].data();
        const double* pq = tp.hq[l].data();
        const double* pw = tp.hw[l].data();
        std::fill(nv.begin(), nv.begin() + in, 0.0);
        std::fill(np.begin(), np.begin() + in, 0.0);
        std::fill(nq.begin(), nq.begin() + in, 0.0);
        std::fill(nw.begin(), nw.begin() + in, 0.0);
        for (int o = 0; o < out; ++o) {
            double zv, zpv, zqv, zwv;
            if (l + 1 < L) {
                // adjoint of tanh with carried derivative lanes:
                //   h.val = tanh(z.val)            h.dx = s z.dx
                //   h.dT  = s z.dT                 h.dxx= s z.dxx - 2 t s z.dx^2
                const double tv = tp.hv[l + 1][o];
                const double s = 1.0 - tv * tv;
                const double p = tp.zp[l][o];
                const double q = tp.zq[l][o];
                const double w_ = tp.zw[l][o];
                const double hv_ = av[o], hp_ = ap[o], hq_ = aq[o], hw_ = aw[o];
                zv = hv_ * s - 2.0 * tv * s * (hp_ * p + hq_ * q + hw_ * w_) -
                     2.0 * s * (s - 2.0 * tv * tv) * p * p * hw_;
                zpv = hp_ * s - 4.0 * tv * s * p * hw_;
                zqv = hq_ * s;
                zwv = hw_ * s;
            } else {
                zv = av[o];
                zpv = ap[o];
                zqv = aq[o];
                zwv = aw[o];
            }
            const double* row = W + static_cast<std::size_t>(o) * in;
            double* grow = gW + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) {
                grow[i] += zv * pv[i] + zpv * pp[i] + zqv * pq[i] + zwv * pw[i];
                const double w = row[i];
                nv[i] += w * zv;
                np[i] += w * zpv;
                nq[i] += w * zqv;
                nw[i] += w * zwv;
            }
            gb[o] += zv;
        }
        std::swap(av, nv);
        std::swap(ap, np);
        std::swap(aq, nq);
        std::swap(aw, nw);
    }
}

// Plain value-only tape for data points.
struct PlainTape {
    std::vector<std::vector<double>> h; // per boundary
    std::vector<double> a, n;

    explicit PlainTape(const std::vector<int>& sizes) {
        h.resize(sizes.size());
        for (std::size_t b = 0; b < sizes.size(); ++b) h[b].resize(sizes[b]);
        int widest = 0;
        for (int s : sizes) widest = std::max(widest, s);
        a.resize(widest);
        n.resize(widest);
    }
};

double forward_plain(const MlpParams& net, double x, double t, double lambda,
                     PlainTape& tp) {
    const auto& sizes = net.layer_sizes;
    const int L = net.layers();
    tp.h[0] = {x, t, lambda};
    for (int l = 0; l < L; ++l) {
        const int in = sizes[l], out = sizes[l + 1];
        const double* W = net.params.data() + net.weight_offset(l);
        const double* b = net.params.data() + net.bias_offset(l);
        const double* prev = tp.h[l].data();
        for (int o = 0; o < out; ++o) {
            const double* row = W + static_cast<std::size_t>(o) * in;
            double z = b[o];
            for (int i = 0; i < in; ++i) z += row[i] * prev[i];
            tp.h[l + 1][o] = l + 1 < L ? std::tanh(z) : z;
        }
    }
    return tp.h[L][0];
}

void reverse_plain(const MlpParams& net, PlainTape& tp, double seed, double* grad) {
    const auto& sizes = net.layer_sizes;
    const int L = net.layers();
    std::vector<double>& a = tp.a;
    std::vector<double>& n = tp.n;
    a[0] = seed;
    for (int l = L - 1; l >= 0; --l) {
        const int in = sizes[l], out = sizes[l + 1];
        const double* W = net.params.data() + net.weight_offset(l);
        double* gW = grad + net.weight_offset(l);
        double* gb = grad + net.bias_offset(l);
        const double* prev = tp.h[l].data();
        std::fill(n.begin(), n.begin() + in, 0.0);
        for (int o = 0; o < out; ++o) {
            double d = a[o];
            if (l + 1 < L) {
                const double tv = tp.h[l + 1][o];
                d *= 1.0 - tv * tv;
            }
            const double* row = W + static_cast<std::size_t>(o) * in;
            double* grow = gW + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) {
                grow[i] += d * prev[i];
                n[i] += row[i] * d;
            }
            gb[o] += d;
        }
        std::swap(a, n);
    }
}

double residual_from_lanes(const OutLanes& y, double lambda) {
    return y.q - lambda * y.p - 0.5 * y.w;
}

} // namespace

double residual(const MlpParams& p, double x, double t, double lambda) {
    const HyperDual y = forward_hd(p, x, t, lambda);
    return y.dt - lambda * y.dx - 0.5 * y.dxx;
}

LossParts loss(const MlpParams& p, const CollocationSets& sets, const PipeConfig& cfg) {
    check_network(p);
    check_sets(sets, cfg);
    LossParts parts;
    const std::size_t np = sets.phys_count();
    if (np > 0 && cfg.omega_p != 0.0) {
        double acc = 0.0;
        for (std::size_t k = 0; k < np; ++k) {
            const double* row = sets.phys.data() + 3 * k;
            const double r = residual(p, row[0], row[1], row[2]);
            acc += r * r;
        }
        parts.lp = cfg.omega_p * acc / static_cast<double>(np);
    }
    const std::size_t nd = sets.data_count();
    if (nd > 0 && cfg.omega_d != 0.0) {
        double acc = 0.0;
        for (std::size_t k = 0; k < nd; ++k) {
            const double* row = sets.data.data() + 4 * k;
            const double in[3] = {row[0], row[1], row[2]};
            const double e = forward(p, in) - row[3];
            acc += e * e;
        }
        parts.ld = cfg.omega_d * acc / static_cast<double>(nd);
    }
    parts.total = parts.lp + parts.ld;
    return parts;
}

std::vector<double> param_grads(const MlpParams& p, const CollocationSets& sets,
                                const PipeConfig& cfg, LossParts* parts) {
    check_network(p);
    check_sets(sets, cfg);
    const std::size_t n = p.params.size();
    const int workers = resolve_threads(cfg.threads);

    std::vector<double> grad(n, 0.0);
    LossParts out;

    const std::size_t np = sets.phys_count();
    if (np > 0 && cfg.omega_p != 0.0) {
        const std::size_t chunks = std::min<std::size_t>(kGradChunks, np);
        std::vector<std::vector<double>> cgrad(chunks);
        std::vector<double> closs(chunks, 0.0);
        const double scale = 2.0 * cfg.omega_p / static_cast<double>(np);
        parallel_chunks(np, chunks, workers,
                        [&](std::size_t c, std::size_t b, std::size_t e) {
                            cgrad[c].assign(n, 0.0);
                            Tape tp(p.layer_sizes);
                            double acc = 0.0;
                            for (std::size_t k = b; k < e; ++k) {
                                const double* row = sets.phys.data() + 3 * k;
                                const double lam = row[2];
                                const OutLanes y = forward_tape(p, row[0], row[1], lam, tp);
                                const double r = residual_from_lanes(y, lam);
                                acc += r * r;
                                const double c2 = scale * r;
                                reverse_tape(p, tp,
                                             {0.0, -lam * c2, c2, -0.5 * c2},
                                             cgrad[c].data());
                            }
                            closs[c] = acc;
                        });
        double acc = 0.0;
        for (std::size_t c = 0; c < chunks; ++c) {
            acc += closs[c];
            for (std::size_t k = 0; k < n; ++k) grad[k] += cgrad[c][k];
        }
        out.lp = cfg.omega_p * acc / static_cast<double>(np);
    }

    const std::size_t nd = sets.data_count();
    if (nd > 0 && cfg.omega_d != 0.0) {
        const std::size_t chunks = std::min<std::size_t>(kGradChunks, nd);
        std::vector<std::vector<double>> cgrad(chunks);
        std::vector<double> closs(chunks, 0.0);
        const double scale = 2.0 * cfg.omega_d / static_cast<double>(nd);
        parallel_chunks(nd, chunks, workers,
                        [&](std::size_t c, std::size_t b, std::size_t e) {
                            cgrad[c].assign(n, 0.0);
                            PlainTape tp(p.layer_sizes);
                            double acc = 0.0;
                            for (std::size_t k = b; k < e; ++k) {
                                const double* row = sets.data.data() + 4 * k;
                                const double err =
                                    forward_plain(p, row[0], row[1], row[2], tp) - row[3];
                                acc += err * err;
                                reverse_plain(p, tp, scale * err, cgrad[c].data());
                            }
                            closs[c] = acc;
                        });
        double acc = 0.0;
        for (std::size_t c = 0; c < chunks; ++c) {
            acc += closs[c];
            for (std::size_t k = 0; k < n; ++k) grad[k] += cgrad[c][k];
        }
        out.ld = cfg.omega_d * acc / static_cast<double>(nd);
    }

    out.total = out.lp + out.ld;
    if (parts) *parts = out;
    return grad;
}

namespace {

void check_config(const PipeConfig& cfg) {
    if (cfg.layer_sizes.size() < 2 || cfg.layer_sizes.front() != 3 ||
        cfg.layer_sizes.back() != 1)
        throw std::invalid_argument("layer sizes must map (x, T, lambda) to a scalar");
    if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (!(cfg.lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (!(cfg.lr_end_factor > 0.0 && cfg.lr_end_factor <= 1.0))
        throw std::invalid_argument("lr_end_factor must be in (0, 1]");
    if (cfg.omega_p < 0.0 || cfg.omega_d < 0.0)
        throw std::invalid_argument("loss weights must be >= 0");
    if (cfg.omega_p + cfg.omega_d <= 0.0)
        throw std::invalid_argument("at least one loss weight must be positive");
    if (!(cfg.x_lo < cfg.x_hi) || !(cfg.t_lo < cfg.t_hi) || cfg.lambda_lo > cfg.lambda_hi)
        throw std::invalid_argument("domain box is empty");
    if (cfg.history_every <= 0) throw std::invalid_argument("history_every must be > 0");
}

void check_point_in_box(const PipeConfig& cfg, double x, double t, double lam,
                        const char* which) {
    const double ex = 1e-9 * (std::abs(cfg.x_lo) + std::abs(cfg.x_hi) + 1.0);
    const double et = 1e-9 * (std::abs(cfg.t_lo) + std::abs(cfg.t_hi) + 1.0);
    const double el = 1e-9 * (std::abs(cfg.lambda_lo) + std::abs(cfg.lambda_hi) + 1.0);
    if (x < cfg.x_lo - ex || x > cfg.x_hi + ex || t < cfg.t_lo - et ||
        t > cfg.t_hi + et || lam < cfg.lambda_lo - el || lam > cfg.lambda_hi + el)
        throw std::invalid_argument(std::string(which) +
                                    " collocation point outside the domain box");
}

} // namespace

TrainResult train(const CollocationSets& sets, const PipeConfig& cfg,
                  const CheckpointSink& sink) {
    check_config(cfg);
    check_sets(sets, cfg);
    for (std::size_t k = 0; k < sets.phys_count(); ++k) {
        const double* row = sets.phys.data() + 3 * k;
        check_point_in_box(cfg, row[0], row[1], row[2], "physics");
    }
    for (std::size_t k = 0; k < sets.data_count(); ++k) {
        const double* row = sets.data.data() + 4 * k;
        check_point_in_box(cfg, row[0], row[1], row[2], "data");
        if (!(row[3] >= -1e-12 && row[3] <= 1.0 + 1e-12))
            throw std::invalid_argument("data target outside [0, 1]");
    }

    InputScaling scaling;
    const InputScaling* scaling_ptr = nullptr;
    if (cfg.normalize_inputs) {
        auto axis = [](double lo, double hi, double& off, double& sc) {
            off = 0.5 * (lo + hi);
            sc = hi > lo ? 0.5 * (hi - lo) : 1.0;
        };
        scaling.offset.resize(3);
        scaling.scale.resize(3);
        axis(cfg.x_lo, cfg.x_hi, scaling.offset[0], scaling.scale[0]);
        axis(cfg.t_lo, cfg.t_hi, scaling.offset[1], scaling.scale[1]);
        axis(cfg.lambda_lo, cfg.lambda_hi, scaling.offset[2], scaling.scale[2]);
        scaling_ptr = &scaling;
    }

    TrainResult res;
    res.params = glorot_init(cfg.layer_sizes, cfg.seed, scaling_ptr);
    res.adam = AdamState::make(res.params.params.size(), cfg.lr);

    int last_sunk = -1;
    LossParts parts;
    const double decay_exp = cfg.epochs > 1 ? 1.0 / (cfg.epochs - 1) : 0.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::vector<double> grad = param_grads(res.params, sets, cfg, &parts);
        if (!std::isfinite(parts.total) || parts.total > cfg.divergence_limit)
            throw std::runtime_error("training diverged at epoch " +
                                     std::to_string(epoch) + " (loss " +
                                     std::to_string(parts.total) + ")");
        if (epoch % cfg.history_every == 0)
            res.history.push_back({epoch, parts.total, parts.lp, parts.ld});
        res.adam.lr = cfg.lr * std::pow(cfg.lr_end_factor, epoch * decay_exp);
        adam_step(res.params, grad, res.adam);
        const int done = epoch + 1;
        if (sink && cfg.checkpoint_every > 0 && done % cfg.checkpoint_every == 0) {
            sink(done, res.params, res.adam);
            last_sunk = done;
        }
    }

    const LossParts fin = loss(res.params, sets, cfg);
    if (!std::isfinite(fin.total) || fin.total > cfg.divergence_limit)
        throw std::runtime_error("training diverged at epoch " +
                                 std::to_string(cfg.epochs) + " (loss " +
                                 std::to_string(fin.total) + ")");
    res.history.push_back({cfg.epochs, fin.total, fin.lp, fin.ld});
    if (sink && last_sunk != cfg.epochs) sink(cfg.epochs, res.params, res.adam);
    return res;
}

void write_history_csv(const std::vector<HistoryRow>& rows, std::ostream& os) {
    os << "epoch,total,Lp,Ld\n";
    for (const auto& r : rows)
        os << r.epoch << ',' << format_double(r.total) << ',' << format_double(r.lp)
           << ',' << format_double(r.ld) << '\n';
}

ProbabilityField predict_field(const MlpParams& p, const GridSpec& grid, double lambda,
                               std::uint64_t* clamped_count) {
    check_network(p);
    grid.validate();
    ProbabilityField f;
    f.grid = grid;
    f.kind = Kind::N;
    f.provenance = Provenance::PINN;
    f.lambda = lambda;
    const int nx = grid.nx(), nt = grid.nt();
    f.values.resize(static_cast<std::size_t>(nx) * nt);
    std::uint64_t clamped = 0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j) {
            const double in[3] = {grid.x(i), grid.t(j), lambda};
            const double raw = forward(p, in);
            const double v = std::clamp(raw, 0.0, 1.0);
            if (v != raw) ++clamped;
            f.at(i, j) = v;
        }
    if (clamped_count) *clamped_count = clamped;
    return f;
}

GradientField gradient_field_ad(const MlpParams& p, const GridSpec& grid, double lambda) {
    check_network(p);
    grid.validate();
    GradientField g;
    g.grid = grid;
    g.provenance = Provenance::PINN;
    g.lambda = lambda;
    const int nx = grid.nx(), nt = grid.nt();
    g.values.resize(static_cast<std::size_t>(nx) * nt);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j)
            g.at(i, j) = forward_hd(p, grid.x(i), grid.t(j), lambda).dx;
    return g;
}

GradientField gradient_field_fd(const ProbabilityField& f) {
    f.grid.validate();
    const int nx = f.grid.nx(), nt = f.grid.nt();
    if (nx < 2) throw std::invalid_argument("need at least two x nodes for a gradient");
    GradientField g;
    g.grid = f.grid;
    g.provenance = f.provenance;
    g.lambda = f.lambda;
    g.values.resize(f.values.size());
    const double dx = f.grid.dx;
    for (int j = 0; j < nt; ++j) {
        g.at(0, j) = (f.at(1, j) - f.at(0, j)) / dx;
        for (int i = 1; i < nx - 1; ++i)
            g.at(i, j) = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * dx);
        g.at(nx - 1, j) = (f.at(nx - 1, j) - f.at(nx - 2, j)) / dx;
    }
    return g;
}

GradientField gradient_field_fd(const MlpParams& p, const GridSpec& grid, double lambda) {
    // Differenced on the raw outputs: clamping would put kinks into an
    // otherwise smooth surface and break the O(dx^2) match with the exact
    // derivative.
    check_network(p);
    grid.validate();
    ProbabilityField f;
    f.grid = grid;
    f.lambda = lambda;
    f.provenance = Provenance::PINN;
    const int nx = grid.nx(), nt = grid.nt();
    f.values.resize(static_cast<std::size_t>(nx) * nt);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j) {
            const double in[3] = {grid.x(i), grid.t(j), lambda};
            f.at(i, j) = forward(p, in);
        }
    return gradient_field_fd(f);
}

CollocationSets make_benchmark_collocation(const std::vector<ProbabilityField>& data_fields,
                                           const GridSpec& phys_grid,
                                           const GridSpec& bc_grid,
                                           const std::vector<double>& lambdas) {
    phys_grid.validate();
    bc_grid.validate();
    if (lambdas.empty()) throw std::invalid_argument("need at least one lambda");
    constexpr double level = 2.0;

    CollocationSets sets;
    const int pnx = phys_grid.nx(), pnt = phys_grid.nt();
    sets.phys.reserve(static_cast<std::size_t>(pnx) * pnt * lambdas.size() * 3);
    for (double lam : lambdas)
        for (int i = 0; i < pnx; ++i)
            for (int j = 0; j < pnt; ++j) {
                sets.phys.push_back(phys_grid.x(i));
                sets.phys.push_back(phys_grid.t(j));
                sets.phys.push_back(lam);
            }

    for (const auto& f : data_fields) {
        if (f.kind != Kind::N)
            throw std::invalid_argument("data fields must hold recovery probabilities");
        const int nx = f.grid.nx(), nt = f.grid.nt();
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nt; ++j) {
                sets.data.push_back(f.grid.x(i));
                sets.data.push_back(f.grid.t(j));
                sets.data.push_back(f.lambda);
                sets.data.push_back(f.at(i, j));
            }
    }

    // Exact rows: level boundary F(level, T) = 1 for T > 0, and the initial
    // slice F(x, 0) = 1(x >= level). The corner (level, 0) comes from the
    // initial slice only.
    for (double lam : lambdas) {
        for (int j = 0; j < bc_grid.nt(); ++j) {
            const double t = bc_grid.t(j);
            if (t <= 0.0) continue;
            sets.data.push_back(level);
            sets.data.push_back(t);
            sets.data.push_back(lam);
            sets.data.push_back(1.0);
        }
        for (int i = 0; i < bc_grid.nx(); ++i) {
            const double x = bc_grid.x(i);
            sets.data.push_back(x);
            sets.data.push_back(0.0);
            sets.data.push_back(lam);
            sets.data.push_back(x >= level ? 1.0 : 0.0);
        }
    }
    return sets;
}

} // namespace riskpde
