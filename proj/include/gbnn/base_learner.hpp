#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gbnn/matrix.hpp"

namespace gbnn {

enum class Activation { Tanh, Logistic, Relu };

std::string activation_name(Activation a);
/// Throws ConfigError on unknown names.
Activation activation_from_name(const std::string& name);

/// Applies the activation to `z` elementwise in place.
void activate(Activation a, std::span<double> z) noexcept;

/// Single-hidden-layer regression network with linear outputs.
///
/// `hidden` is J x (d+1) and `output` is K x (J+1); the last column of each
/// holds the biases.
struct SubNetwork {
    Matrix hidden;
    Matrix output;
    Activation activation = Activation::Tanh;

    std::size_t inputs() const noexcept { return hidden.cols() == 0 ? 0 : hidden.cols() - 1; }
    std::size_t units() const noexcept { return hidden.rows(); }
    std::size_t outputs() const noexcept { return output.rows(); }

    friend bool operator==(const SubNetwork&, const SubNetwork&) = default;
};

/// N x K outputs of `net` on the rows of `features`.
/// Throws ShapeError when the feature width differs from the network input width.
Matrix predict(const SubNetwork& net, const Matrix& features);

struct FitConfig {
    std::size_t max_iterations = 200;
    /// Stop once two consecutive iterations each improve the loss by less
    /// than this fraction.
    double tolerance = 1e-5;
    /// Multiplier on the sqrt(6 / (fan_in + fan_out)) uniform init range.
    double init_scale = 1.0;
    std::size_t history = 10;  // L-BFGS memory
    Activation activation = Activation::Tanh;

    friend bool operator==(const FitConfig&, const FitConfig&) = default;
};

struct FitReport {
    double initial_mse = 0.0;
    double final_mse = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
};

/// Trains a J-unit network on `targets` (N x K) by full-batch L-BFGS with a
/// Wolfe line search on the mean squared error.
///
/// Deterministic for a given seed. Throws TrainingDiverged if the loss
/// becomes non-finite, ConfigError for invalid settings.
SubNetwork fit(const Matrix& features, const Matrix& targets, std::size_t units,
               const FitConfig& config, std::uint64_t seed, FitReport* report = nullptr);

/// Mean over all N*K entries of the squared difference between the network
/// outputs and `targets`.
double mean_squared_error(const SubNetwork& net, const Matrix& features, const Matrix& targets);

/// Objective minimized by fit(): (1 / 2N) * sum of squared errors. When
/// `gradient` is given it receives d(objective)/d(weight) with the shapes
/// of `net`.
double squared_error_objective(const SubNetwork& net, const Matrix& features,
                               const Matrix& targets, SubNetwork* gradient);

/// Glorot-style uniform initialization used by fit().
SubNetwork initialize_network(std::size_t inputs, std::size_t units, std::size_t outputs,
                              Activation activation, double init_scale, std::uint64_t seed);

}  // namespace gbnn
