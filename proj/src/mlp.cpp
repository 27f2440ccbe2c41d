#include "tagsense/mlp.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tagsense/rng.hpp"

namespace tagsense {

namespace {

// Per-sample forward/backward scratch, reused across the training loop.
struct Workspace {
    std::vector<std::vector<double>> pre;    // pre-activation per layer
    std::vector<std::vector<double>> post;   // post-activation per layer
    std::vector<std::vector<double>> delta;  // backprop error per layer input
};

Workspace make_workspace(const Network& net) {
    Workspace ws;
    const std::size_t L = net.layers.size();
    ws.pre.resize(L);
    ws.post.resize(L);
    ws.delta.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
        ws.pre[l].resize(static_cast<std::size_t>(net.layers[l].out_dim));
        ws.post[l].resize(static_cast<std::size_t>(net.layers[l].out_dim));
        ws.delta[l].resize(static_cast<std::size_t>(net.layers[l].in_dim));
    }
    return ws;
}

void affine(const Layer& layer, std::span<const double> in, std::vector<double>& out) {
    const double* w = layer.weights.data();
    const std::size_t in_dim = static_cast<std::size_t>(layer.in_dim);
    for (int o = 0; o < layer.out_dim; ++o) {
        double acc = layer.biases[static_cast<std::size_t>(o)];
        const double* row = w + static_cast<std::size_t>(o) * in_dim;
        for (std::size_t i = 0; i < in_dim; ++i) {
            acc += row[i] * in[i];
        }
        out[static_cast<std::size_t>(o)] = acc;
    }
}

// Fills ws.pre/ws.post; the final layer's pre-activation holds the logits.
void forward_pass(const Network& net, std::span<const double> x, Workspace& ws) {
    std::span<const double> in = x;
    const std::size_t last = net.layers.size() - 1;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        affine(net.layers[l], in, ws.pre[l]);
        if (l < last) {
            for (std::size_t o = 0; o < ws.pre[l].size(); ++o) {
                ws.post[l][o] = ws.pre[l][o] > 0.0 ? ws.pre[l][o] : 0.0;
            }
        } else {
            ws.post[l] = ws.pre[l];  // logits; softmax applied by callers
        }
        in = ws.post[l];
    }
}

void softmax_inplace(std::vector<double>& logits) {
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& v : logits) {
        v = std::exp(v - max_logit);
        if (v < DBL_MIN) v = DBL_MIN;  // keep components strictly positive
        sum += v;
    }
    for (double& v : logits) v /= sum;
}

double log_sum_exp(std::span<const double> logits) {
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (const double v : logits) sum += std::exp(v - max_logit);
    return max_logit + std::log(sum);
}

// Accumulates one sample's gradients into grads; returns the sample loss.
double backward_into(const Network& net, std::span<const double> x, int label,
                     Workspace& ws, GradientSet& grads) {
    forward_pass(net, x, ws);

    const std::vector<double>& logits = ws.pre.back();
    const double loss = log_sum_exp(logits) - logits[static_cast<std::size_t>(label)];

    // Softmax + cross-entropy collapses to (probs - onehot) at the output.
    std::vector<double>& out_delta = ws.post.back();
    out_delta = logits;
    softmax_inplace(out_delta);
    out_delta[static_cast<std::size_t>(label)] -= 1.0;

    const double* delta = out_delta.data();
    for (std::size_t l = net.layers.size(); l-- > 0;) {
        const Layer& layer = net.layers[l];
        const std::size_t in_dim = static_cast<std::size_t>(layer.in_dim);
        const std::span<const double> input =
            (l == 0) ? x : std::span<const double>(ws.post[l - 1]);

        double* gw = grads.weights[l].data();
        double* gb = grads.biases[l].data();
        for (int o = 0; o < layer.out_dim; ++o) {
            const double d = delta[o];
            gb[o] += d;
            double* grow = gw + static_cast<std::size_t>(o) * in_dim;
            for (std::size_t i = 0; i < in_dim; ++i) {
                grow[i] += d * input[i];
            }
        }

        if (l == 0) break;

        // Propagate through the weights, then the previous layer's ReLU.
        std::vector<double>& prev = ws.delta[l];
        std::fill(prev.begin(), prev.end(), 0.0);
        for (int o = 0; o < layer.out_dim; ++o) {
            const double d = delta[o];
            const double* row = layer.weights.data() + static_cast<std::size_t>(o) * in_dim;
            for (std::size_t i = 0; i < in_dim; ++i) {
                prev[i] += d * row[i];
            }
        }
        for (std::size_t i = 0; i < in_dim; ++i) {
            // ReLU subgradient at 0 is 0.
            if (!(ws.pre[l - 1][i] > 0.0)) prev[i] = 0.0;
        }
        delta = prev.data();
    }
    return loss;
}

void check_input_dim(const Network& net, std::span<const double> x) {
    if (static_cast<int>(x.size()) != net.spec.input_dim) {
        throw std::invalid_argument("input dimension " + std::to_string(x.size()) +
                                    " does not match network input_dim " +
                                    std::to_string(net.spec.input_dim));
    }
}

}  // namespace

void validate(const NetworkSpec& spec) {
    if (spec.input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
    if (spec.output_dim < 1) throw std::invalid_argument("output_dim must be >= 1");
    for (const int width : spec.hidden_layers) {
        if (width < 1) throw std::invalid_argument("hidden layer width must be >= 1");
    }
}

NetworkSpec single_point_network_spec(std::uint64_t seed) {
    return NetworkSpec{2, {128, 64, 32, 16}, 7, seed};
}

NetworkSpec one_second_network_spec(std::uint64_t seed) {
    return NetworkSpec{4, {128, 64, 32}, 7, seed};
}

NetworkSpec with_distance_network_spec(std::uint64_t seed) {
    return NetworkSpec{5, {32, 16, 32}, 4, seed};
}

std::size_t Network::parameter_count() const {
    std::size_t count = 0;
    for (const Layer& layer : layers) {
        count += layer.weights.size() + layer.biases.size();
    }
    return count;
}

Network init_network(const NetworkSpec& spec) {
    validate(spec);
    Network net;
    net.spec = spec;

    std::vector<int> dims;
    dims.push_back(spec.input_dim);
    dims.insert(dims.end(), spec.hidden_layers.begin(), spec.hidden_layers.end());
    dims.push_back(spec.output_dim);

    Rng rng(derive_seed(spec.seed, "init"));
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.in_dim = dims[l];
        layer.out_dim = dims[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(layer.in_dim));
        layer.weights.resize(static_cast<std::size_t>(layer.in_dim) *
                             static_cast<std::size_t>(layer.out_dim));
        for (double& w : layer.weights) w = rng.uniform(-bound, bound);
        layer.biases.assign(static_cast<std::size_t>(layer.out_dim), 0.0);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

std::vector<double> forward_logits(const Network& net, std::span<const double> x) {
    check_input_dim(net, x);
    Workspace ws = make_workspace(net);
    forward_pass(net, x, ws);
    return ws.pre.back();
}

std::vector<double> forward(const Network& net, std::span<const double> x) {
    std::vector<double> probs = forward_logits(net, x);
    softmax_inplace(probs);
    return probs;
}

double cross_entropy(std::span<const double> pred, int label) {
    if (label < 0 || label >= static_cast<int>(pred.size())) {
        throw std::invalid_argument("label out of range: " + std::to_string(label));
    }
    const double p = std::max(pred[static_cast<std::size_t>(label)], 1e-12);
    return -std::log(p);
}

void GradientSet::zero() {
    for (auto& g : weights) std::fill(g.begin(), g.end(), 0.0);
    for (auto& g : biases) std::fill(g.begin(), g.end(), 0.0);
}

GradientSet make_gradients(const Network& net) {
    GradientSet grads;
    for (const Layer& layer : net.layers) {
        grads.weights.emplace_back(layer.weights.size(), 0.0);
        grads.biases.emplace_back(layer.biases.size(), 0.0);
    }
    return grads;
}

double backward(const Network& net, std::span<const double> x, int label,
                GradientSet& grads) {
    check_input_dim(net, x);
    if (label < 0 || label >= net.spec.output_dim) {
        throw std::invalid_argument("label out of range: " + std::to_string(label));
    }
    Workspace ws = make_workspace(net);
    return backward_into(net, x, label, ws, grads);
}

AdamState make_adam_state(const Network& net) {
    AdamState state;
    for (const Layer& layer : net.layers) {
        state.m_weights.emplace_back(layer.weights.size(), 0.0);
        state.v_weights.emplace_back(layer.weights.size(), 0.0);
        state.m_biases.emplace_back(layer.biases.size(), 0.0);
        state.v_biases.emplace_back(layer.biases.size(), 0.0);
    }
    state.t = 0;
    return state;
}

void adam_step(AdamState& state, Network& net, const GradientSet& grads,
               double lr, double beta1, double beta2, double epsilon) {
    state.t += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));

    auto update = [&](std::vector<double>& params, const std::vector<double>& g,
                      std::vector<double>& m, std::vector<double>& v) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            params[i] -= lr * m_hat / (std::sqrt(v_hat) + epsilon);
        }
    };

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        update(net.layers[l].weights, grads.weights[l], state.m_weights[l],
               state.v_weights[l]);
        update(net.layers[l].biases, grads.biases[l], state.m_biases[l],
               state.v_biases[l]);
    }
}

int class_output_index(const std::vector<MaterialClass>& classes, MaterialClass label) {
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i] == label) return static_cast<int>(i);
    }
    throw std::invalid_argument("label " + std::string(to_string(label)) +
                                " is not in the network's class list");
}

namespace {

double mean_loss(const Network& net, const std::vector<int>& labels,
                 const std::vector<LabeledSample>& samples, Workspace& ws) {
    double total = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        forward_pass(net, samples[i].features.values, ws);
        const std::vector<double>& logits = ws.pre.back();
        total += log_sum_exp(logits) - logits[static_cast<std::size_t>(labels[i])];
    }
    return total / static_cast<double>(samples.size());
}

}  // namespace

TrainHistory train(Network& net, const std::vector<MaterialClass>& classes,
                   const std::vector<LabeledSample>& train_set,
                   const std::vector<LabeledSample>& val_set,
                   const TrainConfig& cfg) {
    if (train_set.empty() || val_set.empty()) {
        throw std::invalid_argument("train and validation sets must be non-empty");
    }
    if (static_cast<int>(classes.size()) != net.spec.output_dim) {
        throw std::invalid_argument("class list size does not match network output_dim");
    }
    if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (cfg.patience < 1) throw std::invalid_argument("patience must be >= 1");
    for (const auto& s : train_set) {
        if (static_cast<int>(s.features.values.size()) != net.spec.input_dim) {
            throw std::invalid_argument("training sample dimension mismatch");
        }
    }
    for (const auto& s : val_set) {
        if (static_cast<int>(s.features.values.size()) != net.spec.input_dim) {
            throw std::invalid_argument("validation sample dimension mismatch");
        }
    }

    // Labels resolved once up front.
    std::vector<int> train_labels(train_set.size());
    for (std::size_t i = 0; i < train_set.size(); ++i) {
        train_labels[i] = class_output_index(classes, train_set[i].label);
    }
    std::vector<int> val_labels(val_set.size());
    for (std::size_t i = 0; i < val_set.size(); ++i) {
        val_labels[i] = class_output_index(classes, val_set[i].label);
    }

    TrainHistory history;
    AdamState adam = make_adam_state(net);
    GradientSet grads = make_gradients(net);
    Workspace ws = make_workspace(net);
    Rng shuffle_rng(derive_seed(cfg.shuffle_seed, "shuffle"));

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    double best_val = std::numeric_limits<double>::infinity();
    std::vector<Layer> best_params = net.layers;
    int best_epoch = 0;
    int epochs_without_improvement = 0;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        shuffle(order, shuffle_rng);

        double epoch_loss = 0.0;
        const std::size_t n = order.size();
        for (std::size_t start = 0; start < n;
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
            grads.zero();
            for (std::size_t k = start; k < end; ++k) {
                const std::size_t idx = order[k];
                epoch_loss += backward_into(net, train_set[idx].features.values,
                                            train_labels[idx], ws, grads);
            }
            const double inv = 1.0 / static_cast<double>(end - start);
            for (auto& g : grads.weights) {
                for (double& v : g) v *= inv;
            }
            for (auto& g : grads.biases) {
                for (double& v : g) v *= inv;
            }
            adam_step(adam, net, grads, cfg.learning_rate, cfg.beta1, cfg.beta2,
                      cfg.epsilon);
        }

        history.train_loss.push_back(epoch_loss / static_cast<double>(n));
        const double val = mean_loss(net, val_labels, val_set, ws);
        history.val_loss.push_back(val);

        if (val < best_val - cfg.min_delta) {
            best_val = val;
            best_params = net.layers;
            best_epoch = epoch;
            epochs_without_improvement = 0;
        } else {
            ++epochs_without_improvement;
            if (epochs_without_improvement >= cfg.patience) break;
        }
    }

    net.layers = std::move(best_params);
    history.best_epoch = best_epoch;
    return history;
}

std::pair<int, std::vector<double>> predict(const Network& net,
                                            std::span<const double> x) {
    std::vector<double> probs = forward(net, x);
    int best = 0;
    for (int k = 1; k < static_cast<int>(probs.size()); ++k) {
        if (probs[static_cast<std::size_t>(k)] > probs[static_cast<std::size_t>(best)]) {
            best = k;
        }
    }
    return {best, std::move(probs)};
}

}  // namespace tagsense
