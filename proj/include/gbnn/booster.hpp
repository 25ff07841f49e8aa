#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gbnn/base_learner.hpp"
#include "gbnn/losses.hpp"
#include "gbnn/matrix.hpp"

namespace gbnn {

struct TrainConfig {
    std::size_t stages = 100;          // T
    std::size_t units_per_stage = 1;   // J
    double learning_rate = 1.0;        // shrinkage, in (0, 1]
    double subsample = 1.0;            // row fraction per stage, in (0, 1]
    TaskKind task = TaskKind::regression();
    FitConfig fit;
    std::uint64_t seed = 0;
    /// Line search over all training rows (true) or only the stage subsample.
    bool rho_on_full_data = true;
    /// Stop after this many stages without training-loss improvement; 0 = off.
    std::size_t patience = 0;

    /// Throws ConfigError when a field is outside its range.
    void validate() const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// One boosting stage: h_t and its shrinkage-folded Newton coefficients nu * rho.
struct StageModel {
    SubNetwork net;
    std::vector<double> rho_eff;

    friend bool operator==(const StageModel&, const StageModel&) = default;
};

struct BoostedEnsemble {
    std::vector<double> f0;
    std::vector<StageModel> stages;
    TrainConfig config;
    std::size_t feature_width = 0;
    /// Mean training loss of F_0, F_1, ..., one entry per stage plus one.
    std::vector<double> training_log;

    std::size_t outputs() const noexcept { return f0.size(); }

    friend bool operator==(const BoostedEnsemble&, const BoostedEnsemble&) = default;
};

/// Per-stage record passed to a training observer.
struct StageEvent {
    std::size_t stage = 0;       // 1-based
    std::size_t fit_rows = 0;    // rows the sub-network was trained on
    std::size_t rho_rows = 0;    // rows the line search used
    std::vector<double> rho;     // before shrinkage
    double loss = 0.0;           // training loss after the stage
    FitReport fit;
};

using StageObserver = std::function<void(const StageEvent&)>;

/// Gradient-boosted training of a shallow network.
///
/// `targets` is the encoded target matrix for `config.task` (see TaskKind).
/// Throws ConfigError on invalid settings or single-class binary targets,
/// DataError on malformed targets.
BoostedEnsemble train(const Matrix& features, const Matrix& targets, const TrainConfig& config,
                      const StageObserver& observer = {});

/// F_m(x) = f0 + sum over the first m stages of rho_eff (.) h_t(x).
/// Throws RangeError when m exceeds the stage count, ShapeError on width mismatch.
Matrix staged_margins(const BoostedEnsemble& model, const Matrix& features, std::size_t m);

/// output_transform of staged_margins; all stages when `m` is empty.
Matrix predict(const BoostedEnsemble& model, const Matrix& features,
               std::optional<std::size_t> m = std::nullopt);

/// Calls `visit(m, margin)` for m = 0..stages with the running margin,
/// evaluating each stage once.
void for_each_stage_margin(const BoostedEnsemble& model, const Matrix& features,
                           const std::function<void(std::size_t, const Matrix&)>& visit);

}  // namespace gbnn
