#include "riskpde/nn.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "riskpde/rng.hpp"

namespace riskpde {

namespace {

void check_sizes(const std::vector<int>& sizes) {
    if (sizes.size() < 2)
        throw std::invalid_argument("network needs at least input and output layers");
    for (int s : sizes)
        if (s <= 0) throw std::invalid_argument("layer sizes must be positive");
    if (sizes.back() != 1)
        throw std::invalid_argument("output layer must be scalar");
}

} // namespace

std::size_t MlpParams::param_count(const std::vector<int>& sizes) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
        n += static_cast<std::size_t>(sizes[l + 1]) * sizes[l] + sizes[l + 1];
    return n;
}

std::size_t MlpParams::weight_offset(int layer) const {
    std::size_t off = 0;
    for (int l = 0; l < layer; ++l)
        off += static_cast<std::size_t>(layer_sizes[l + 1]) * layer_sizes[l] +
               layer_sizes[l + 1];
    return off;
}

std::size_t MlpParams::bias_offset(int layer) const {
    return weight_offset(layer) +
           static_cast<std::size_t>(layer_sizes[layer + 1]) * layer_sizes[layer];
}

MlpParams glorot_init(const std::vector<int>& sizes, std::uint64_t seed,
                      const InputScaling* scaling) {
    check_sizes(sizes);
    if (scaling && (scaling->offset.size() != static_cast<std::size_t>(sizes[0]) ||
                    scaling->scale.size() != static_cast<std::size_t>(sizes[0])))
        throw std::invalid_argument("input scaling must match the input width");

    MlpParams p;
    p.layer_sizes = sizes;
    p.params.assign(MlpParams::param_count(sizes), 0.0);

    UniformStream rng(seed);
    for (int l = 0; l + 1 < static_cast<int>(sizes.size()); ++l) {
        const int in = sizes[l], out = sizes[l + 1];
        const double limit = std::sqrt(6.0 / (in + out));
        double* w = p.params.data() + p.weight_offset(l);
        for (int o = 0; o < out; ++o)
            for (int i = 0; i < in; ++i)
                w[o * in + i] = (2.0 * rng.next() - 1.0) * limit;
        // biases start at zero
    }

    if (scaling) {
        // Fold u = (in - offset)/scale into layer 0, keeping the stored
        // network a plain MLP over raw inputs.
        const int in = sizes[0], out = sizes[1];
        double* w = p.params.data() + p.weight_offset(0);
        double* b = p.params.data() + p.bias_offset(0);
        for (int o = 0; o < out; ++o) {
            double shift = 0.0;
            for (int i = 0; i < in; ++i) {
                if (scaling->scale[i] == 0.0)
                    throw std::invalid_argument("input scale must be nonzero");
                w[o * in + i] /= scaling->scale[i];
                shift += w[o * in + i] * scaling->offset[i];
            }
            b[o] = -shift;
        }
    }
    return p;
}

namespace {

inline double apply_tanh(double v) { return std::tanh(v); }
inline HyperDual apply_tanh(const HyperDual& v) { return tanh(v); }

// One kernel for every scalar type so the value lane of a derivative-carrying
// pass is bit-identical to the plain pass.
template <class S>
S forward_kernel(const MlpParams& p, const S* input) {
    const auto& sizes = p.layer_sizes;
    const int layers = p.layers();
    std::vector<S> cur(input, input + sizes[0]), next;
    for (int l = 0; l < layers; ++l) {
        const int in = sizes[l], out = sizes[l + 1];
        const double* w = p.params.data() + p.weight_offset(l);
        const double* b = p.params.data() + p.bias_offset(l);
        next.assign(static_cast<std::size_t>(out), S{});
        for (int o = 0; o < out; ++o) {
            S acc = S{} + b[o];
            const double* row = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) acc = acc + row[i] * cur[i];
            next[o] = l + 1 < layers ? apply_tanh(acc) : acc;
        }
        cur.swap(next);
    }
    return cur[0];
}

} // namespace

double forward(const MlpParams& p, std::span<const double> input) {
    check_sizes(p.layer_sizes);
    if (input.size() != static_cast<std::size_t>(p.layer_sizes[0]))
        throw std::invalid_argument("input width does not match the network");
    if (p.params.size() != MlpParams::param_count(p.layer_sizes))
        throw std::invalid_argument("parameter vector does not match layer sizes");
    return forward_kernel<double>(p, input.data());
}

HyperDual forward_hd(const MlpParams& p, double x, double t, double lambda) {
    check_sizes(p.layer_sizes);
    if (p.layer_sizes[0] != 3)
        throw std::invalid_argument("derivative pass expects (x, T, lambda) inputs");
    if (p.params.size() != MlpParams::param_count(p.layer_sizes))
        throw std::invalid_argument("parameter vector does not match layer sizes");
    const HyperDual in[3] = {HyperDual::var_x(x), HyperDual::var_t(t),
                             HyperDual::constant(lambda)};
    return forward_kernel<HyperDual>(p, in);
}

AdamState AdamState::make(std::size_t n, double lr) {
    AdamState s;
    s.lr = lr;
    s.m.assign(n, 0.0);
    s.v.assign(n, 0.0);
    return s;
}

void adam_step(MlpParams& p, std::span<const double> grad, AdamState& s) {
    const std::size_t n = p.params.size();
    if (grad.size() != n || s.m.size() != n || s.v.size() != n)
        throw std::invalid_argument("gradient/moment sizes do not match the parameters");
    s.step += 1;
    const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
    const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
    for (std::size_t i = 0; i < n; ++i) {
        s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * grad[i];
        s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * grad[i] * grad[i];
        const double mhat = s.m[i] / bc1;
        const double vhat = s.v[i] / bc2;
        p.params[i] -= s.lr * mhat / (std::sqrt(vhat) + s.eps);
    }
}

void save_checkpoint(std::ostream& os, const MlpParams& p, const AdamState& s,
                     std::uint64_t seed, const std::string& config_hash) {
    check_sizes(p.layer_sizes);
    if (p.params.size() != MlpParams::param_count(p.layer_sizes) ||
        s.m.size() != p.params.size() || s.v.size() != p.params.size())
        throw std::invalid_argument("checkpoint state is inconsistent");
    nlohmann::json j;
    j["layer_sizes"] = p.layer_sizes;
    auto weights = nlohmann::json::array();
    auto biases = nlohmann::json::array();
    for (int l = 0; l < p.layers(); ++l) {
        const std::size_t wn =
            static_cast<std::size_t>(p.layer_sizes[l + 1]) * p.layer_sizes[l];
        const double* w = p.params.data() + p.weight_offset(l);
        const double* b = p.params.data() + p.bias_offset(l);
        weights.push_back(std::vector<double>(w, w + wn));
        biases.push_back(
            std::vector<double>(b, b + static_cast<std::size_t>(p.layer_sizes[l + 1])));
    }
    j["weights"] = std::move(weights);
    j["biases"] = std::move(biases);
    j["adam"] = {{"step", s.step}, {"m", s.m}, {"v", s.v}, {"lr", s.lr}};
    j["seed"] = seed;
    j["config_hash"] = config_hash;
    os << j.dump(1) << '\n';
    if (!os) throw std::runtime_error("checkpoint write failed");
}

Checkpoint load_checkpoint(std::istream& is) {
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad checkpoint JSON: ") + e.what());
    }
    try {
        Checkpoint c;
        c.params.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
        check_sizes(c.params.layer_sizes);
        c.params.params.assign(MlpParams::param_count(c.params.layer_sizes), 0.0);
        const auto& weights = j.at("weights");
        const auto& biases = j.at("biases");
        if (static_cast<int>(weights.size()) != c.params.layers() ||
            static_cast<int>(biases.size()) != c.params.layers())
            throw std::invalid_argument("checkpoint layer count mismatch");
        for (int l = 0; l < c.params.layers(); ++l) {
            const auto w = weights[l].get<std::vector<double>>();
            const auto b = biases[l].get<std::vector<double>>();
            const std::size_t wn = static_cast<std::size_t>(c.params.layer_sizes[l + 1]) *
                                   c.params.layer_sizes[l];
            if (w.size() != wn ||
                b.size() != static_cast<std::size_t>(c.params.layer_sizes[l + 1]))
                throw std::invalid_argument("checkpoint layer shape mismatch");
            std::copy(w.begin(), w.end(),
                      c.params.params.begin() + c.params.weight_offset(l));
            std::copy(b.begin(), b.end(),
                      c.params.params.begin() + c.params.bias_offset(l));
        }
        const auto& a = j.at("adam");
        c.adam.step = a.at("step").get<std::int64_t>();
        c.adam.lr = a.at("lr").get<double>();
        c.adam.m = a.at("m").get<std::vector<double>>();
        c.adam.v = a.at("v").get<std::vector<double>>();
        if (c.adam.m.size() != c.params.params.size() ||
            c.adam.v.size() != c.params.params.size())
            throw std::invalid_argument("checkpoint moment size mismatch");
        c.seed = j.at("seed").get<std::uint64_t>();
        c.config_hash = j.at("config_hash").get<std::string>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad checkpoint JSON: ") + e.what());
    }
}

void save_checkpoint_file(const std::string& path, const MlpParams& p, const AdamState& s,
                          std::uint64_t seed, const std::string& config_hash) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    save_checkpoint(os, p, s, seed, config_hash);
}

Checkpoint load_checkpoint_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return load_checkpoint(is);
}

} // namespace riskpde
