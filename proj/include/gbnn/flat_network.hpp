#pragma once

#include <cstddef>
#include <vector>

#include "gbnn/base_learner.hpp"
#include "gbnn/booster.hpp"
#include "gbnn/losses.hpp"
#include "gbnn/matrix.hpp"

namespace gbnn {

/// A boosted ensemble rewritten as one standard single-hidden-layer network.
///
/// Hidden units are stored in training order, `units_per_stage` per stage.
/// The output bias of a network with m active stages is
/// `base_bias + sum_{t < m} stage_bias[:, t]`; keeping the per-stage terms
/// separate is what makes truncation exact.
///
/// Output activation: sigmoid (binary), softmax (multi-class), identity
/// (regression). For binary tasks the factor 2 of p = 1/(1+exp(-2F)) is
/// folded into the weights, so the network applies a plain sigmoid.
struct FlatNetwork {
    Matrix hidden;                 // (T*J) x (d+1), last column = hidden biases
    Matrix output;                 // K x (T*J)
    Matrix stage_bias;             // K x T
    std::vector<double> base_bias; // K
    Activation activation = Activation::Tanh;
    TaskKind task = TaskKind::regression();
    std::size_t units_per_stage = 1;
    std::size_t active_stages = 0;

    std::size_t stages() const noexcept { return stage_bias.cols(); }
    std::size_t inputs() const noexcept { return hidden.cols() == 0 ? 0 : hidden.cols() - 1; }
    std::size_t outputs() const noexcept { return output.rows(); }
    std::size_t active_units() const noexcept { return active_stages * units_per_stage; }

    /// Throws ShapeError if the matrices disagree with each other.
    void validate() const;

    friend bool operator==(const FlatNetwork&, const FlatNetwork&) = default;
};

/// Hidden-unit evaluation counter filled by forward().
struct ForwardStats {
    std::size_t hidden_units_evaluated = 0;  // summed over rows
};

/// Assembles the flat network from a trained ensemble; all stages active.
/// Throws ConfigError if the ensemble has no stages.
FlatNetwork flatten(const BoostedEnsemble& model);

/// Copy of `net` evaluating only the first m stages' hidden units.
/// Throws RangeError when m > net.stages().
FlatNetwork set_active_stages(FlatNetwork net, std::size_t m);

/// Network predictions (probabilities or regression values), N x K.
Matrix forward(const FlatNetwork& net, const Matrix& features, ForwardStats* stats = nullptr);

}  // namespace gbnn
