#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarface/eigenspace.hpp"
#include "polarface/linalg.hpp"
#include "polarface/rng.hpp"

namespace polarface {

/// Feed-forward perceptron: every computed layer applies tansig (the
/// hyperbolic tangent, output in (-1, 1)). layer_sizes runs input first;
/// weights[l] is layer_sizes[l+1] x layer_sizes[l]. The recognition
/// pipeline always builds the five-layer shape (input, three hidden,
/// output); the struct itself supports any depth.
struct MlpNetwork {
    std::vector<std::size_t> layer_sizes;
    std::vector<Mat> weights;
    std::vector<std::vector<double>> biases;

    std::size_t input_size() const { return layer_sizes.front(); }
    std::size_t output_size() const { return layer_sizes.back(); }
    std::size_t layer_count() const { return weights.size(); }

    bool operator==(const MlpNetwork& other) const = default;
};

struct TrainConfig {
    double learning_rate = 0.02;
    double momentum = 0.9;  // 0 = plain gradient descent, 1 = repeat last change
    std::size_t max_epochs = 5000;
    double target_mse = 1e-3;
    std::uint64_t rng_seed = 0;
};

/// Mutable training companion: the last applied weight change (for the
/// momentum term) plus the per-epoch error trace.
struct TrainState {
    std::vector<Mat> prev_weight_delta;
    std::vector<std::vector<double>> prev_bias_delta;
    std::size_t epoch = 0;
    std::vector<double> mse_history;
};

struct MlpGradient {
    std::vector<Mat> weights;
    std::vector<std::vector<double>> biases;
};

/// Training stopped on a non-finite loss.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(std::size_t epoch)
        : std::runtime_error("training diverged: loss became non-finite at epoch " +
                             std::to_string(epoch)),
          epoch_(epoch) {}

    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

inline double tansig(double x) { return std::tanh(x); }

inline MlpNetwork init_network(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("init_network: need at least 2 layers");
    for (std::size_t n : layer_sizes)
        if (n == 0) throw std::invalid_argument("init_network: layer sizes must be positive");

    MlpNetwork net;
    net.layer_sizes = layer_sizes;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const std::size_t fan_in = layer_sizes[l];
        const std::size_t fan_out = layer_sizes[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Mat w(fan_out, fan_in);
        for (double& x : w.data) x = rng.uniform(-bound, bound);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

/// All layer activations of one forward pass; activations[0] is the input,
/// activations.back() the network output.
struct ForwardTrace {
    std::vector<std::vector<double>> activations;

    const std::vector<double>& output() const { return activations.back(); }
};

inline ForwardTrace forward(const MlpNetwork& net, const std::vector<double>& input) {
    if (input.size() != net.input_size())
        throw std::invalid_argument("forward: input has " + std::to_string(input.size()) +
                                    " values, network expects " +
                                    std::to_string(net.input_size()));
    ForwardTrace trace;
    trace.activations.reserve(net.layer_count() + 1);
    trace.activations.push_back(input);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const Mat& w = net.weights[l];
        const auto& b = net.biases[l];
        const auto& prev = trace.activations.back();
        std::vector<double> a(w.rows);
        for (std::size_t i = 0; i < w.rows; ++i) {
            double z = b[i];
            for (std::size_t j = 0; j < w.cols; ++j) z += w(i, j) * prev[j];
            a[i] = tansig(z);
        }
        trace.activations.push_back(std::move(a));
    }
    return trace;
}

inline ForwardTrace forward(const MlpNetwork& net, const FeatureVector& input) {
    return forward(net, input.coords);
}

inline MlpGradient zero_gradient(const MlpNetwork& net) {
    MlpGradient g;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        g.weights.emplace_back(net.weights[l].rows, net.weights[l].cols);
        g.biases.emplace_back(net.biases[l].size(), 0.0);
    }
    return g;
}

/// Gradient of E = 1/2 sum over examples of ||target - output||^2, summed
/// over the whole batch (so a batch gradient is exactly the sum of the
/// per-example gradients). The tansig derivative is applied as 1 - a^2.
/// When `mse_out` is given it receives sum ||target - output||^2 / batch.
inline MlpGradient batch_gradient(const MlpNetwork& net, const std::vector<FeatureVector>& inputs,
                                  const std::vector<std::vector<double>>& targets,
                                  double* mse_out = nullptr) {
    if (inputs.empty()) throw std::invalid_argument("batch_gradient: empty batch");
    if (inputs.size() != targets.size())
        throw std::invalid_argument("batch_gradient: " + std::to_string(inputs.size()) +
                                    " inputs vs " + std::to_string(targets.size()) + " targets");

    MlpGradient grad = zero_gradient(net);
    const std::size_t layers = net.layer_count();
    double sq_err = 0.0;

    for (std::size_t e = 0; e < inputs.size(); ++e) {
        if (targets[e].size() != net.output_size())
            throw std::invalid_argument("batch_gradient: target size " +
                                        std::to_string(targets[e].size()) +
                                        " does not match output size " +
                                        std::to_string(net.output_size()));
        const ForwardTrace trace = forward(net, inputs[e]);

        const auto& out = trace.output();
        std::vector<double> delta(out.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double err = out[i] - targets[e][i];
            sq_err += err * err;
            delta[i] = err * (1.0 - out[i] * out[i]);
        }

        for (std::size_t l = layers; l-- > 0;) {
            const auto& below = trace.activations[l];
            Mat& gw = grad.weights[l];
            auto& gb = grad.biases[l];
            for (std::size_t i = 0; i < gw.rows; ++i) {
                gb[i] += delta[i];
                for (std::size_t j = 0; j < gw.cols; ++j) gw(i, j) += delta[i] * below[j];
            }
            if (l > 0) {
                const Mat& w = net.weights[l];
                std::vector<double> next(w.cols, 0.0);
                for (std::size_t j = 0; j < w.cols; ++j) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < w.rows; ++i) s += w(i, j) * delta[i];
                    next[j] = s * (1.0 - below[j] * below[j]);
                }
                delta = std::move(next);
            }
        }
    }
    if (mse_out) *mse_out = sq_err / static_cast<double>(inputs.size());
    return grad;
}

/// Weight update blending the previous change with the fresh gradient step:
/// delta = momentum * prev_delta + (1 - momentum) * rate * (-gradient).
/// Momentum 0 reduces to a pure gradient step; momentum 1 repeats the last
/// change and ignores the gradient. Biases follow the identical rule.
inline void momentum_step(MlpNetwork& net, const MlpGradient& grad, TrainState& state,
                          const TrainConfig& cfg) {
    if (cfg.momentum < 0.0 || cfg.momentum > 1.0)
        throw std::invalid_argument("momentum_step: momentum must be in [0, 1]");
    if (state.prev_weight_delta.empty()) {
        state.prev_weight_delta = zero_gradient(net).weights;
        state.prev_bias_delta = zero_gradient(net).biases;
    }
    const double mc = cfg.momentum;
    const double rate = cfg.learning_rate;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        Mat& w = net.weights[l];
        Mat& pd = state.prev_weight_delta[l];
        const Mat& g = grad.weights[l];
        for (std::size_t k = 0; k < w.data.size(); ++k) {
            const double d = mc * pd.data[k] + (1.0 - mc) * rate * (-g.data[k]);
            w.data[k] += d;
            pd.data[k] = d;
        }
        auto& b = net.biases[l];
        auto& pb = state.prev_bias_delta[l];
        const auto& gb = grad.biases[l];
        for (std::size_t k = 0; k < b.size(); ++k) {
            const double d = mc * pb[k] + (1.0 - mc) * rate * (-gb[k]);
            b[k] += d;
            pb[k] = d;
        }
    }
}

struct TrainResult {
    MlpNetwork network;
    TrainState state;
};

/// Full-batch training: repeats {batch gradient -> momentum step} until
/// `max_epochs` updates have been applied or the per-example mean squared
/// error reaches `target_mse`. The error is measured at the start of each
/// epoch, so the last history entry is always the returned network's MSE.
/// Deterministic given (network, data, config).
inline TrainResult train(MlpNetwork net, const std::vector<FeatureVector>& inputs,
                         const std::vector<std::vector<double>>& targets,
                         const TrainConfig& cfg) {
    TrainState state;
    for (;;) {
        double mse = 0.0;
        const MlpGradient grad = batch_gradient(net, inputs, targets, &mse);
        state.mse_history.push_back(mse);
        if (!std::isfinite(mse)) throw DivergenceError(state.epoch);
        if (mse <= cfg.target_mse) break;
        if (state.epoch >= cfg.max_epochs) break;
        momentum_step(net, grad, state, cfg);
        ++state.epoch;
    }
    return {std::move(net), std::move(state)};
}

/// Argmax classification over the output units, ties broken by the lowest
/// index. With a rejection threshold, a winning output below it yields
/// nullopt (REJECT).
inline std::optional<std::size_t> classify(const MlpNetwork& net, const FeatureVector& input,
                                           std::optional<double> reject_threshold = std::nullopt) {
    const ForwardTrace trace = forward(net, input);
    const auto& out = trace.output();
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i] > out[best]) best = i;
    if (reject_threshold && out[best] < *reject_threshold) return std::nullopt;
    return best;
}

struct ConstructiveConfig {
    std::vector<std::size_t> initial_hidden{16, 12, 8};
    double growth = 2.0;
    std::size_t max_rounds = 4;
};

struct ConstructiveResult {
    MlpNetwork network;
    TrainState state;
    std::vector<std::size_t> hidden_sizes;
};

/// Constructive sizing: starts from a small hidden configuration and grows
/// it geometrically, retraining from scratch each round, until the training
/// MSE target is met; otherwise returns the round with the lowest final MSE.
inline ConstructiveResult fit_constructive(std::size_t input_dim, std::size_t class_count,
                                           const std::vector<FeatureVector>& inputs,
                                           const std::vector<std::vector<double>>& targets,
                                           const TrainConfig& cfg,
                                           const ConstructiveConfig& cc = {}) {
    if (cc.max_rounds == 0)
        throw std::invalid_argument("fit_constructive: max_rounds must be positive");
    ConstructiveResult best;
    double best_mse = std::numeric_limits<double>::infinity();
    double factor = 1.0;
    for (std::size_t round = 0; round < cc.max_rounds; ++round, factor *= cc.growth) {
        std::vector<std::size_t> sizes{input_dim};
        std::vector<std::size_t> hidden;
        for (std::size_t h : cc.initial_hidden) {
            const auto grown = static_cast<std::size_t>(std::lround(h * factor));
            hidden.push_back(std::max<std::size_t>(1, grown));
        }
        sizes.insert(sizes.end(), hidden.begin(), hidden.end());
        sizes.push_back(class_count);

        TrainResult r = train(init_network(sizes, cfg.rng_seed + round), inputs, targets, cfg);
        const double mse = r.state.mse_history.back();
        if (mse < best_mse) {
            best_mse = mse;
            best = {std::move(r.network), std::move(r.state), std::move(hidden)};
        }
        if (best_mse <= cfg.target_mse) break;
    }
    return best;
}

}  // namespace polarface
