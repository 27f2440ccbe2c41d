#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tagsense/domain.hpp"

namespace tagsense {

struct NetworkSpec {
    int input_dim = 0;
    std::vector<int> hidden_layers;
    int output_dim = 0;
    std::uint64_t seed = 0;
};

void validate(const NetworkSpec& spec);

// The three canonical architectures.
NetworkSpec single_point_network_spec(std::uint64_t seed);   // 2 -> 128,64,32,16 -> 7
NetworkSpec one_second_network_spec(std::uint64_t seed);     // 4 -> 128,64,32 -> 7
NetworkSpec with_distance_network_spec(std::uint64_t seed);  // 5 -> 32,16,32 -> 4

// One dense layer; weights are row-major (out_dim rows of in_dim).
struct Layer {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<double> weights;
    std::vector<double> biases;
};

// Feedforward network: ReLU on hidden layers, softmax on the output.
struct Network {
    NetworkSpec spec;
    std::vector<Layer> layers;

    std::size_t parameter_count() const;
};

// He-uniform weights (bound sqrt(6 / fan_in)), zero biases, deterministic
// per spec.seed.
Network init_network(const NetworkSpec& spec);

// Output class probabilities for one input. Throws on dimension mismatch.
std::vector<double> forward(const Network& net, std::span<const double> x);

// Raw output-layer logits (pre-softmax).
std::vector<double> forward_logits(const Network& net, std::span<const double> x);

// -log(pred[label]), with pred[label] clamped to >= 1e-12.
double cross_entropy(std::span<const double> pred, int label);

// Gradients mirroring the network's layer shapes.
struct GradientSet {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    void zero();
};

GradientSet make_gradients(const Network& net);

// Cross-entropy gradients for one sample; returns the sample loss computed
// via the log-sum-exp path. Gradients are accumulated (+=) into grads so a
// minibatch can share one GradientSet.
double backward(const Network& net, std::span<const double> x, int label,
                GradientSet& grads);

// Adam first/second moment accumulators.
struct AdamState {
    std::vector<std::vector<double>> m_weights, v_weights;
    std::vector<std::vector<double>> m_biases, v_biases;
    std::int64_t t = 0;
};

AdamState make_adam_state(const Network& net);

// One bias-corrected Adam update; increments t.
void adam_step(AdamState& state, Network& net, const GradientSet& grads,
               double lr, double beta1 = 0.9, double beta2 = 0.999,
               double epsilon = 1e-8);

struct TrainConfig {
    int batch_size = 16;
    double learning_rate = 0.001;
    int max_epochs = 100;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int patience = 10;       // early stopping
    double min_delta = 0.0;  // required val-loss improvement
    std::uint64_t shuffle_seed = 0;
};

struct TrainHistory {
    std::vector<double> train_loss;  // one entry per epoch actually run
    std::vector<double> val_loss;
    int best_epoch = 0;  // 0-based index of the restored epoch
};

// Maps a label to its output index within the network's class list; throws
// when the label is not in the list.
int class_output_index(const std::vector<MaterialClass>& classes, MaterialClass label);

// Mini-batch Adam training with per-epoch seeded shuffling and early
// stopping on validation loss. The network is left holding the parameters of
// the best-validation epoch.
TrainHistory train(Network& net, const std::vector<MaterialClass>& classes,
                   const std::vector<LabeledSample>& train_set,
                   const std::vector<LabeledSample>& val_set,
                   const TrainConfig& cfg);

// Argmax of forward(); ties break toward the lowest class index.
std::pair<int, std::vector<double>> predict(const Network& net,
                                            std::span<const double> x);

}  // namespace tagsense
