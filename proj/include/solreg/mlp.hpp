#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "solreg/dataio.hpp"

namespace solreg {

enum class ActivationKind { Tanh, Sigmoid, Identity };

std::string activation_name(ActivationKind kind);
ActivationKind activation_from_name(const std::string& name);

double activation_eval(ActivationKind kind, double x);
// Derivative expressed through the activation's own output value
// (tanh' = 1 - t^2, sigmoid' = s(1 - s), identity' = 1).
double activation_deriv_from_value(ActivationKind kind, double value);

// Single-hidden-layer perceptron: output = K(b2 + w2 . Q(b1 + w1 x)).
struct MlpParams {
    std::size_t hidden_dim = 0;
    std::vector<double> w1; // hidden_dim x 5, row-major
    std::vector<double> b1; // hidden_dim
    std::vector<double> w2; // hidden_dim
    double b2 = 0.0;
    ActivationKind hidden_activation = ActivationKind::Tanh;   // Q
    ActivationKind output_activation = ActivationKind::Identity; // K
};

// hidden_dim*5 + hidden_dim + hidden_dim + 1
std::size_t mlp_param_count(std::size_t hidden_dim);

double mlp_forward(const MlpParams& params, const double* x);

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer, biases
// zero; deterministic per seed.
MlpParams mlp_init(std::size_t hidden_dim, std::uint64_t seed,
                   ActivationKind hidden = ActivationKind::Tanh,
                   ActivationKind output = ActivationKind::Identity);

// Mean squared error of mlp_forward over the dataset.
double mlp_mse(const MlpParams& params, const Dataset& data);

// Same cost evaluated directly on a flat parameter vector in the
// param_to_vector layout; avoids re-materializing MlpParams per call.
double mlp_mse_flat(const double* v, std::size_t hidden_dim,
                    ActivationKind hidden, ActivationKind output, const Dataset& data);

// d(MSE)/d(theta) in the param_to_vector layout.
std::vector<double> backprop_gradient(const MlpParams& params, const Dataset& batch);

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t epochs = 2000;
    std::uint64_t seed = 0;
    std::size_t repetitions = 3;
};

struct MlpTrainResult {
    MlpParams params;
    std::vector<double> trace; // per-epoch training MSE (after the step)
};

// Full-batch gradient descent with a fixed learning rate.  Throws with the
// epoch index if the loss becomes non-finite.
MlpTrainResult train_mlp_gd(const MlpParams& init, const Dataset& train, const TrainConfig& cfg);

// Flat layout: rows of w1, then b1, then w2, then b2.
std::vector<double> param_to_vector(const MlpParams& params);
MlpParams vector_to_param(const std::vector<double>& v, std::size_t hidden_dim,
                          ActivationKind hidden = ActivationKind::Tanh,
                          ActivationKind output = ActivationKind::Identity);

// Plain-text persistence: key-value lines plus the flat parameter array.
void save_mlp(const MlpParams& params, const std::string& path);
MlpParams load_mlp(const std::string& path);

} // namespace solreg
