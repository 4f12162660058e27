#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace eyespot {

enum class Loss {
    mse,
    cross_entropy,
};

/// Two-layer network: n_in -> n_hidden (logsig) -> 1 (logsig).
struct MlpParams {
    int n_in = 0;
    int n_hidden = 0;
    std::vector<double> w1; // n_hidden x n_in, row-major
    std::vector<double> b1; // n_hidden
    std::vector<double> w2; // n_hidden
    double b2 = 0.0;

    void validate() const;
};

struct Gradients {
    std::vector<double> w1;
    std::vector<double> b1;
    std::vector<double> w2;
    double b2 = 0.0;
};

struct TrainConfig {
    double learning_rate = 0.05;
    int epochs = 200;
    std::uint64_t seed = 0;
    Loss loss = Loss::mse;
    bool shuffle = true;
};

struct TrainSample {
    std::vector<double> x;
    double target = 0.0; // 0 or 1
};

struct TrainResult {
    MlpParams model;
    std::vector<double> loss_history; // one mean-loss entry per epoch
};

/// Strictly inside (0,1) for every finite input.
double logsig(double z);

/// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero;
/// draw order: w1 row-major, then w2.
MlpParams init_mlp(int n_in, int n_hidden, std::uint64_t seed);

double forward(const MlpParams& m, std::span<const double> x);

double sample_loss(const MlpParams& m, std::span<const double> x, double target, Loss loss);

Gradients backprop_gradient(const MlpParams& m, std::span<const double> x, double target,
                            Loss loss);

/// Per-sample SGD. Each update subtracts learning_rate times the exact
/// backprop_gradient entry; identical seed and inputs give bit-identical
/// results.
TrainResult train(const MlpParams& m, const std::vector<TrainSample>& samples,
                  const TrainConfig& cfg);

/// Indices of the k largest scores, ties broken toward the lower index.
std::vector<int> competitive_select(std::span<const double> scores, int k = 1);

void save_model(const MlpParams& m, const std::string& path);
MlpParams load_model(const std::string& path);

} // namespace eyespot
