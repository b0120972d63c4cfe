#pragma once

// Small convolutional network for slice-stack inputs: four same-padded conv
// layers with max pooling, then three dense layers ending in a sigmoid unit.
// Forward, backward, and the RMSprop update are implemented directly in
// double precision so gradients can be validated against finite differences.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hive/errors.hpp"
#include "hive/matrix.hpp"

namespace hive {

struct Conv2dSpec {
    std::size_t kh = 3, kw = 3;
    std::size_t out_channels = 16;
};

struct PoolSpec {
    std::size_t ph = 2, pw = 2;
};

struct CnnArchitecture {
    std::vector<Conv2dSpec> convs = {{3, 3, 16}, {3, 3, 16}, {3, 1, 16}, {3, 1, 16}};
    // 2x2 pooling early, time-only 2x1 late so narrow band axes survive
    std::vector<PoolSpec> pools = {{2, 2}, {2, 2}, {2, 1}, {2, 1}};
    std::vector<std::size_t> dense_units = {256, 32, 1};
    double leaky_slope = 0.01;
};

namespace cnn_detail {

struct Tensor3 {
    std::size_t h = 0, w = 0, c = 0;
    std::vector<double> v;

    Tensor3() = default;
    Tensor3(std::size_t h_, std::size_t w_, std::size_t c_)
        : h(h_), w(w_), c(c_), v(h_ * w_ * c_, 0.0) {}

    double& at(std::size_t y, std::size_t x, std::size_t ch) { return v[(y * w + x) * c + ch]; }
    double at(std::size_t y, std::size_t x, std::size_t ch) const {
        return v[(y * w + x) * c + ch];
    }
};

}  // namespace cnn_detail

// weights layout: w[((oc*kh + dy)*kw + dx)*in_c + ic]
struct ConvLayer {
    Conv2dSpec spec;
    std::size_t in_channels = 1;
    std::vector<double> w;
    std::vector<double> b;
};

// weights layout: w[o*in + i]
struct DenseLayer {
    std::size_t in = 0, out = 0;
    std::vector<double> w;
    std::vector<double> b;
};

struct CnnModel {
    CnnArchitecture arch;
    std::size_t input_rows = 0, input_cols = 0;
    std::vector<ConvLayer> convs;
    std::vector<DenseLayer> dense;
    // output shape (h, w, c) after each conv+pool stage, then the flat size
    std::vector<std::array<std::size_t, 3>> stage_shapes;
    std::size_t flat_dim = 0;
};

template <typename Model, typename Fn>
void visit_params(Model& model, Fn&& fn) {
    for (auto& layer : model.convs) {
        fn(layer.w);
        fn(layer.b);
    }
    for (auto& layer : model.dense) {
        fn(layer.w);
        fn(layer.b);
    }
}

inline std::size_t parameter_count(const CnnModel& model) {
    std::size_t n = 0;
    visit_params(model, [&](const std::vector<double>& p) { n += p.size(); });
    return n;
}

// He-style uniform initialization scaled by fan-in; biases start at zero.
inline CnnModel build_cnn(const CnnArchitecture& arch, std::size_t input_rows,
                          std::size_t input_cols, uint64_t seed) {
    if (arch.convs.size() != arch.pools.size())
        throw std::invalid_argument("build_cnn: one pool per conv layer required");
    if (arch.dense_units.empty() || arch.dense_units.back() != 1)
        throw std::invalid_argument("build_cnn: final dense layer must have one unit");

    CnnModel model;
    model.arch = arch;
    model.input_rows = input_rows;
    model.input_cols = input_cols;

    std::mt19937_64 rng(seed);
    const auto he_uniform = [&](std::vector<double>& w, std::size_t fan_in) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (auto& v : w) v = dist(rng);
    };

    std::size_t h = input_rows, w = input_cols, c = 1;
    for (std::size_t i = 0; i < arch.convs.size(); ++i) {
        ConvLayer layer;
        layer.spec = arch.convs[i];
        layer.in_channels = c;
        layer.w.resize(layer.spec.out_channels * layer.spec.kh * layer.spec.kw * c);
        layer.b.assign(layer.spec.out_channels, 0.0);
        he_uniform(layer.w, layer.spec.kh * layer.spec.kw * c);
        model.convs.push_back(std::move(layer));

        c = arch.convs[i].out_channels;
        h /= arch.pools[i].ph;
        w /= arch.pools[i].pw;
        if (h == 0 || w == 0)
            throw std::invalid_argument("build_cnn: input " + std::to_string(input_rows) + "x" +
                                        std::to_string(input_cols) +
                                        " collapses to nothing at pool stage " + std::to_string(i));
        model.stage_shapes.push_back({h, w, c});
    }
    model.flat_dim = h * w * c;

    std::size_t in_dim = model.flat_dim;
    for (std::size_t units : arch.dense_units) {
        DenseLayer layer;
        layer.in = in_dim;
        layer.out = units;
        layer.w.resize(units * in_dim);
        layer.b.assign(units, 0.0);
        he_uniform(layer.w, in_dim);
        model.dense.push_back(std::move(layer));
        in_dim = units;
    }
    return model;
}

namespace cnn_detail {

inline double leaky(double z, double slope) { return z > 0.0 ? z : slope * z; }
inline double leaky_grad(double z, double slope) { return z > 0.0 ? 1.0 : slope; }

inline void conv_forward(const ConvLayer& layer, const Tensor3& in, Tensor3& z) {
    const std::size_t pad_y = layer.spec.kh / 2;
    const std::size_t pad_x = layer.spec.kw / 2;
    z = Tensor3(in.h, in.w, layer.spec.out_channels);
    for (std::size_t y = 0; y < in.h; ++y)
        for (std::size_t x = 0; x < in.w; ++x)
            for (std::size_t oc = 0; oc < layer.spec.out_channels; ++oc) {
                double acc = layer.b[oc];
                for (std::size_t dy = 0; dy < layer.spec.kh; ++dy) {
                    const auto sy = static_cast<std::ptrdiff_t>(y + dy) -
                                    static_cast<std::ptrdiff_t>(pad_y);
                    if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(in.h)) continue;
                    for (std::size_t dx = 0; dx < layer.spec.kw; ++dx) {
                        const auto sx = static_cast<std::ptrdiff_t>(x + dx) -
                                        static_cast<std::ptrdiff_t>(pad_x);
                        if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(in.w)) continue;
                        const double* wp =
                            &layer.w[((oc * layer.spec.kh + dy) * layer.spec.kw + dx) *
                                     layer.in_channels];
                        const double* ip =
                            &in.v[(static_cast<std::size_t>(sy) * in.w +
                                   static_cast<std::size_t>(sx)) * in.c];
                        for (std::size_t ic = 0; ic < layer.in_channels; ++ic)
                            acc += wp[ic] * ip[ic];
                    }
                }
                z.at(y, x, oc) = acc;
            }
}

inline void conv_backward(const ConvLayer& layer, const Tensor3& in, const Tensor3& dz,
                          Tensor3& din, std::vector<double>& dw, std::vector<double>& db) {
    const std::size_t pad_y = layer.spec.kh / 2;
    const std::size_t pad_x = layer.spec.kw / 2;
    din = Tensor3(in.h, in.w, in.c);
    for (std::size_t y = 0; y < in.h; ++y)
        for (std::size_t x = 0; x < in.w; ++x)
            for (std::size_t oc = 0; oc < layer.spec.out_channels; ++oc) {
                const double g = dz.at(y, x, oc);
                if (g == 0.0) continue;
                db[oc] += g;
                for (std::size_t dy = 0; dy < layer.spec.kh; ++dy) {
                    const auto sy = static_cast<std::ptrdiff_t>(y + dy) -
                                    static_cast<std::ptrdiff_t>(pad_y);
                    if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(in.h)) continue;
                    for (std::size_t dx = 0; dx < layer.spec.kw; ++dx) {
                        const auto sx = static_cast<std::ptrdiff_t>(x + dx) -
                                        static_cast<std::ptrdiff_t>(pad_x);
                        if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(in.w)) continue;
                        const std::size_t base =
                            ((oc * layer.spec.kh + dy) * layer.spec.kw + dx) * layer.in_channels;
                        const std::size_t in_base =
                            (static_cast<std::size_t>(sy) * in.w + static_cast<std::size_t>(sx)) *
                            in.c;
                        for (std::size_t ic = 0; ic < layer.in_channels; ++ic) {
                            dw[base + ic] += g * in.v[in_base + ic];
                            din.v[in_base + ic] += g * layer.w[base + ic];
                        }
                    }
                }
            }
}

// Floor pooling: windows that do not fit are dropped, matching the stage
// shape table. Ties keep the first (scan-order) maximum.
inline void pool_forward(const PoolSpec& pool, const Tensor3& in, Tensor3& out,
                         std::vector<std::size_t>& argmax) {
    out = Tensor3(in.h / pool.ph, in.w / pool.pw, in.c);
    argmax.assign(out.v.size(), 0);
    for (std::size_t y = 0; y < out.h; ++y)
        for (std::size_t x = 0; x < out.w; ++x)
            for (std::size_t ch = 0; ch < in.c; ++ch) {
                double best = -std::numeric_limits<double>::infinity();
                std::size_t best_idx = 0;
                for (std::size_t dy = 0; dy < pool.ph; ++dy)
                    for (std::size_t dx = 0; dx < pool.pw; ++dx) {
                        const std::size_t idx =
                            ((y * pool.ph + dy) * in.w + (x * pool.pw + dx)) * in.c + ch;
                        if (in.v[idx] > best) {
                            best = in.v[idx];
                            best_idx = idx;
                        }
                    }
                const std::size_t out_idx = (y * out.w + x) * out.c + ch;
                out.v[out_idx] = best;
                argmax[out_idx] = best_idx;
            }
}

inline void pool_backward(const Tensor3& in, const Tensor3& dout,
                          const std::vector<std::size_t>& argmax, Tensor3& din) {
    din = Tensor3(in.h, in.w, in.c);
    for (std::size_t i = 0; i < dout.v.size(); ++i) din.v[argmax[i]] += dout.v[i];
}

}  // namespace cnn_detail

// Everything the backward pass needs from one forward evaluation.
struct CnnForwardCache {
    std::vector<cnn_detail::Tensor3> conv_inputs;   // input to each conv
    std::vector<cnn_detail::Tensor3> conv_pre;      // pre-activation z
    std::vector<cnn_detail::Tensor3> pool_inputs;   // activated conv output
    std::vector<std::vector<std::size_t>> pool_argmax;
    std::vector<std::vector<double>> dense_inputs;  // post-dropout input per dense layer
    std::vector<std::vector<double>> dense_pre;     // pre-activation per dense layer
    std::vector<std::vector<double>> dropout_scale; // per-unit multiplier (0 or 1/(1-rate))
    double score = 0.0;
};

// Forward pass. In training mode, dropout masks (scaled by 1/(1-rate)) are
// drawn from `rng` for the inputs of each dense layer.
inline double cnn_forward_cached(const CnnModel& model, const Matrix& input,
                                 CnnForwardCache& cache, bool train_mode = false,
                                 double dropout_rate = 0.0, std::mt19937_64* rng = nullptr) {
    if (input.rows() != model.input_rows || input.cols() != model.input_cols)
        throw std::invalid_argument("cnn forward: input shape " + std::to_string(input.rows()) +
                                    "x" + std::to_string(input.cols()) + " does not match model " +
                                    std::to_string(model.input_rows) + "x" +
                                    std::to_string(model.input_cols));

    using cnn_detail::Tensor3;
    const std::size_t n_convs = model.convs.size();
    cache.conv_inputs.resize(n_convs);
    cache.conv_pre.resize(n_convs);
    cache.pool_inputs.resize(n_convs);
    cache.pool_argmax.resize(n_convs);
    cache.dense_inputs.resize(model.dense.size());
    cache.dense_pre.resize(model.dense.size());
    cache.dropout_scale.resize(model.dense.size());

    Tensor3 current(model.input_rows, model.input_cols, 1);
    for (std::size_t r = 0; r < input.rows(); ++r)
        for (std::size_t c = 0; c < input.cols(); ++c) current.at(r, c, 0) = input(r, c);

    const double slope = model.arch.leaky_slope;
    for (std::size_t i = 0; i < n_convs; ++i) {
        cache.conv_inputs[i] = current;
        cnn_detail::conv_forward(model.convs[i], current, cache.conv_pre[i]);
        Tensor3 activated = cache.conv_pre[i];
        for (auto& v : activated.v) v = cnn_detail::leaky(v, slope);
        cache.pool_inputs[i] = std::move(activated);
        cnn_detail::pool_forward(model.arch.pools[i], cache.pool_inputs[i], current,
                                 cache.pool_argmax[i]);
    }

    std::vector<double> activation = std::move(current.v);  // flatten, layout preserved
    const bool dropping = train_mode && dropout_rate > 0.0;
    std::bernoulli_distribution keep(1.0 - dropout_rate);
    for (std::size_t i = 0; i < model.dense.size(); ++i) {
        auto& scale = cache.dropout_scale[i];
        scale.assign(activation.size(), 1.0);
        if (dropping) {
            const double keep_scale = 1.0 / (1.0 - dropout_rate);
            for (auto& s : scale) s = (rng && keep(*rng)) ? keep_scale : 0.0;
            for (std::size_t k = 0; k < activation.size(); ++k) activation[k] *= scale[k];
        }
        cache.dense_inputs[i] = activation;

        const DenseLayer& layer = model.dense[i];
        std::vector<double> z(layer.out);
        for (std::size_t o = 0; o < layer.out; ++o) {
            const double* wp = &layer.w[o * layer.in];
            double acc = layer.b[o];
            for (std::size_t k = 0; k < layer.in; ++k) acc += wp[k] * activation[k];
            z[o] = acc;
        }
        cache.dense_pre[i] = z;
        if (i + 1 < model.dense.size()) {
            for (auto& v : z) v = cnn_detail::leaky(v, slope);
        }
        activation = std::move(z);
    }

    cache.score = 1.0 / (1.0 + std::exp(-cache.dense_pre.back()[0]));
    return cache.score;
}

// Deterministic inference (dropout disabled).
inline double cnn_forward(const CnnModel& model, const Matrix& input) {
    CnnForwardCache cache;
    return cnn_forward_cached(model, input, cache);
}

inline constexpr double kLossClampLo = 1e-7;
inline constexpr double kLossClampHi = 1.0 - 1e-7;

// Binary cross-entropy with the score clamped away from 0 and 1.
inline double bce_loss(double score, int label) {
    const double s = std::clamp(score, kLossClampLo, kLossClampHi);
    return label == 1 ? -std::log(s) : -std::log(1.0 - s);
}

// Gradient buffers shaped like the model's parameters.
struct CnnGradients {
    std::vector<ConvLayer> convs;
    std::vector<DenseLayer> dense;
};

inline CnnGradients make_gradients(const CnnModel& model) {
    CnnGradients g;
    g.convs = model.convs;
    g.dense = model.dense;
    visit_params(g, [](std::vector<double>& p) { std::fill(p.begin(), p.end(), 0.0); });
    return g;
}

// Accumulates d(bce_loss)/d(parameter) into `grads` for one sample, reusing
// the activations cached by the matching forward call. Outside the clamp
// range the loss is constant, so the gradient is zero there.
inline void cnn_backward(const CnnModel& model, const CnnForwardCache& cache, int label,
                         CnnGradients& grads) {
    using cnn_detail::Tensor3;
    const double s = cache.score;
    double dz = (s <= kLossClampLo || s >= kLossClampHi) ? 0.0
                                                         : s - static_cast<double>(label);

    const double slope = model.arch.leaky_slope;
    std::vector<double> delta = {dz};
    for (std::size_t i = model.dense.size(); i-- > 0;) {
        const DenseLayer& layer = model.dense[i];
        const auto& in = cache.dense_inputs[i];
        auto& gw = grads.dense[i].w;
        auto& gb = grads.dense[i].b;
        std::vector<double> din(layer.in, 0.0);
        for (std::size_t o = 0; o < layer.out; ++o) {
            const double g = delta[o];
            if (g == 0.0) continue;
            gb[o] += g;
            const double* wp = &layer.w[o * layer.in];
            double* gwp = &gw[o * layer.in];
            for (std::size_t k = 0; k < layer.in; ++k) {
                gwp[k] += g * in[k];
                din[k] += g * wp[k];
            }
        }
        // back through dropout on this layer's input
        const auto& scale = cache.dropout_scale[i];
        for (std::size_t k = 0; k < din.size(); ++k) din[k] *= scale[k];
        if (i > 0) {
            // back through the previous layer's leaky activation
            const auto& pre = cache.dense_pre[i - 1];
            for (std::size_t k = 0; k < din.size(); ++k)
                din[k] *= cnn_detail::leaky_grad(pre[k], slope);
        }
        delta = std::move(din);
    }

    // delta now matches the flattened final pool output
    const auto& last_shape = model.stage_shapes.back();
    Tensor3 dcurrent(last_shape[0], last_shape[1], last_shape[2]);
    dcurrent.v = std::move(delta);
    for (std::size_t i = model.convs.size(); i-- > 0;) {
        Tensor3 dpool_in;
        cnn_detail::pool_backward(cache.pool_inputs[i], dcurrent, cache.pool_argmax[i], dpool_in);
        const auto& pre = cache.conv_pre[i];
        for (std::size_t k = 0; k < dpool_in.v.size(); ++k)
            dpool_in.v[k] *= cnn_detail::leaky_grad(pre.v[k], slope);
        cnn_detail::conv_backward(model.convs[i], cache.conv_inputs[i], dpool_in, dcurrent,
                                  grads.convs[i].w, grads.convs[i].b);
    }
}

// v <- rho*v + (1-rho)*g^2;  p <- p - lr*g/(sqrt(v) + eps)
inline void rmsprop_step(std::vector<double>& params, const std::vector<double>& grads,
                         std::vector<double>& state, double lr, double rho, double eps) {
    if (params.size() != grads.size() || params.size() != state.size())
        throw std::invalid_argument("rmsprop_step: shape mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        state[i] = rho * state[i] + (1.0 - rho) * grads[i] * grads[i];
        params[i] -= lr * grads[i] / (std::sqrt(state[i]) + eps);
    }
}

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 145;
    double learning_rate = 1e-3;
    double rho = 0.9;
    double epsilon = 1e-8;
    double dropout_rate = 0.5;
    std::size_t patience = 5;
    uint64_t seed = 0;
};

struct CnnSample {
    Matrix x;
    int label = 0;  // {0, 1}
};

struct EpochLog {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct CnnTrainOutcome {
    CnnModel model;  // weights of the best validation epoch
    std::vector<EpochLog> log;
};

inline void save_training_log(const std::vector<EpochLog>& log,
                              const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write training log: " + path.string());
    out << "epoch,train_loss,val_loss\n";
    out.precision(12);
    for (const auto& e : log) out << e.epoch << ',' << e.train_loss << ',' << e.val_loss << '\n';
}

// Mini-batch training with RMSprop and early stopping on validation loss.
// Batches are reshuffled every epoch; the final short batch is used. Stops
// when validation loss has not improved for `patience` consecutive epochs
// and returns the weights of the best epoch. Deterministic per seed.
inline CnnTrainOutcome cnn_train(const std::vector<CnnSample>& train,
                                 const std::vector<CnnSample>& val,
                                 const CnnArchitecture& arch, const TrainConfig& cfg) {
    if (train.empty() || val.empty())
        throw std::invalid_argument("cnn_train: train and validation sets must be nonempty");
    const std::size_t rows = train.front().x.rows();
    const std::size_t cols = train.front().x.cols();

    CnnModel model = build_cnn(arch, rows, cols, cfg.seed);
    CnnGradients grads = make_gradients(model);

    std::vector<std::vector<double>> rms_state;
    visit_params(model, [&](std::vector<double>& p) {
        rms_state.emplace_back(p.size(), 0.0);
    });

    std::vector<std::vector<double>*> grad_arrays;
    visit_params(grads, [&](std::vector<double>& p) { grad_arrays.push_back(&p); });

    std::mt19937_64 rng(cfg.seed ^ 0x5851f42d4c957f2dULL);
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    CnnTrainOutcome outcome;
    CnnModel best = model;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t stale_epochs = 0;

    CnnForwardCache cache;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double train_loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            visit_params(grads, [](std::vector<double>& p) {
                std::fill(p.begin(), p.end(), 0.0);
            });
            for (std::size_t k = start; k < end; ++k) {
                const CnnSample& sample = train[order[k]];
                const double score = cnn_forward_cached(model, sample.x, cache, true,
                                                        cfg.dropout_rate, &rng);
                train_loss_sum += bce_loss(score, sample.label);
                cnn_backward(model, cache, sample.label, grads);
            }
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            std::size_t slot = 0;
            visit_params(model, [&](std::vector<double>& p) {
                auto& g = *grad_arrays[slot];
                for (auto& v : g) v *= inv_batch;
                rmsprop_step(p, g, rms_state[slot], cfg.learning_rate, cfg.rho, cfg.epsilon);
                ++slot;
            });
        }
        const double train_loss = train_loss_sum / static_cast<double>(train.size());

        double val_loss_sum = 0.0;
        for (const auto& sample : val)
            val_loss_sum += bce_loss(cnn_forward_cached(model, sample.x, cache), sample.label);
        const double val_loss = val_loss_sum / static_cast<double>(val.size());

        if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
            throw NumericError("cnn_train: non-finite loss at epoch " + std::to_string(epoch) +
                               " (train " + std::to_string(train_loss) + ", val " +
                               std::to_string(val_loss) + ")");
        outcome.log.push_back({epoch, train_loss, val_loss});

        if (val_loss < best_val) {
            best_val = val_loss;
            best = model;
            stale_epochs = 0;
        } else {
            ++stale_epochs;
            if (stale_epochs >= cfg.patience) break;
        }
    }

    outcome.model = std::move(best);
    return outcome;
}

// Versioned little-endian binary model file, magic "HCNN"; parameters are
// stored as f32.
inline void save_cnn(const CnnModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write CNN model: " + path.string());
    const char magic[4] = {'H', 'C', 'N', 'N'};
    out.write(magic, 4);
    const auto put_u32 = [&](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    put_u32(1);  // version
    put_u32(static_cast<uint32_t>(model.input_rows));
    put_u32(static_cast<uint32_t>(model.input_cols));
    put_u32(static_cast<uint32_t>(model.arch.convs.size()));
    for (std::size_t i = 0; i < model.arch.convs.size(); ++i) {
        put_u32(static_cast<uint32_t>(model.arch.convs[i].kh));
        put_u32(static_cast<uint32_t>(model.arch.convs[i].kw));
        put_u32(static_cast<uint32_t>(model.arch.convs[i].out_channels));
        put_u32(static_cast<uint32_t>(model.arch.pools[i].ph));
        put_u32(static_cast<uint32_t>(model.arch.pools[i].pw));
    }
    put_u32(static_cast<uint32_t>(model.arch.dense_units.size()));
    for (std::size_t units : model.arch.dense_units) put_u32(static_cast<uint32_t>(units));
    out.write(reinterpret_cast<const char*>(&model.arch.leaky_slope), 8);
    visit_params(model, [&](const std::vector<double>& p) {
        for (double v : p) {
            const auto f = static_cast<float>(v);
            out.write(reinterpret_cast<const char*>(&f), 4);
        }
    });
    if (!out) throw DataError("short write on CNN model: " + path.string());
}

inline CnnModel load_cnn(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open CNN model: " + path.string());
    char magic[4];
    in.read(magic, 4);
    const auto get_u32 = [&] {
        uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    const uint32_t version = get_u32();
    if (!in || std::string(magic, 4) != "HCNN")
        throw DataError("not a CNN model file: " + path.string());
    if (version != 1)
        throw DataError("unsupported CNN model version " + std::to_string(version));

    const std::size_t rows = get_u32();
    const std::size_t cols = get_u32();
    CnnArchitecture arch;
    arch.convs.resize(get_u32());
    arch.pools.resize(arch.convs.size());
    for (std::size_t i = 0; i < arch.convs.size(); ++i) {
        arch.convs[i].kh = get_u32();
        arch.convs[i].kw = get_u32();
        arch.convs[i].out_channels = get_u32();
        arch.pools[i].ph = get_u32();
        arch.pools[i].pw = get_u32();
    }
    arch.dense_units.resize(get_u32());
    for (auto& u : arch.dense_units) u = get_u32();
    in.read(reinterpret_cast<char*>(&arch.leaky_slope), 8);
    if (!in) throw DataError("truncated CNN model file: " + path.string());

    CnnModel model = build_cnn(arch, rows, cols, 0);
    visit_params(model, [&](std::vector<double>& p) {
        for (auto& v : p) {
            float f = 0.0f;
            in.read(reinterpret_cast<char*>(&f), 4);
            v = static_cast<double>(f);
        }
    });
    if (!in) throw DataError("truncated CNN model file: " + path.string());
    return model;
}

}  // namespace hive
