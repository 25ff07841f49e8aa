#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gbnn/booster.hpp"
#include "gbnn/dataset.hpp"
#include "gbnn/flat_network.hpp"

namespace gbnn {

enum class Metric { Accuracy, Rmse };

Metric metric_for(const TaskKind& task) noexcept;
std::string metric_name(Metric m);
/// True when `a` is a strictly better score than `b`.
bool metric_better(Metric m, double a, double b) noexcept;

/// Class index per row: binary p > 0.5 is the positive class (index 1),
/// multi-class takes the first argmax.
std::vector<std::size_t> predicted_classes(const Matrix& predictions, const TaskKind& task);

/// Accuracy in [0, 1] for classification, RMSE for regression.
double score(const Matrix& predictions, const Matrix& targets, const TaskKind& task);

/// Test-row index lists for k folds. Classification data are stratified so
/// each fold holds floor or ceil of every class's share; if a class has
/// fewer members than folds, plain random folds are used and a warning is
/// appended. Deterministic per seed.
std::vector<std::vector<std::size_t>> make_folds(const Dataset& data, std::size_t folds,
                                                 std::uint64_t seed,
                                                 std::vector<std::string>* warnings = nullptr);

struct CVOptions {
    std::size_t folds = 10;
    std::uint64_t seed = 0;
    /// Fit a z-score standardizer on each training fold and apply it to the
    /// matching test fold.
    bool standardize = true;
    /// Worker threads for independent cells; 0 = hardware concurrency.
    std::size_t threads = 1;
};

struct CVReport {
    Metric metric = Metric::Accuracy;
    std::vector<double> fold_metrics;
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation of fold_metrics
    std::vector<TrainConfig> chosen;  // configuration used in each fold
    double wall_seconds = 0.0;
    std::vector<std::string> warnings;
};

/// Mean and population standard deviation.
std::array<double, 2> mean_and_stddev(const std::vector<double>& values);

/// Trains `config` on k-1 folds and scores the held-out fold, k times.
/// Throws ConfigError when folds < 2 or folds > N.
CVReport kfold_cv(const Dataset& data, const TrainConfig& config, const CVOptions& options);

/// `repeats` random splits with `train_size` training rows and the rest held
/// out; options.folds is ignored.
CVReport repeated_holdout(const Dataset& data, const TrainConfig& config, std::size_t train_size,
                          std::size_t repeats, const CVOptions& options);

struct GridSpec {
    std::vector<double> learning_rates;
    std::vector<double> subsamples;
    std::vector<std::size_t> units_per_stage;
    std::size_t stages = 100;
    /// When positive, each cell uses ceil(units_budget / J) stages so every
    /// cell ends with the same hidden-layer size; `stages` is then ignored.
    std::size_t units_budget = 0;
    std::size_t folds = 10;

    /// Learning rates {0.1, 0.25, 0.5, 1}, subsamples {0.5, 0.75, 1}, J in {1, 2, 3}.
    static GridSpec binary_default();
    /// Learning rates {0.025, 0.05, 0.1, 0.5, 1}, subsamples {0.25, 0.5, 0.75, 1}, J in {1..4}.
    static GridSpec multiclass_regression_default();
    static GridSpec default_for(const TaskKind& task);

    /// Cartesian product applied on top of `base`.
    std::vector<TrainConfig> expand(const TrainConfig& base) const;
};

struct GridCell {
    TrainConfig config;
    CVReport report;
};

struct GridResult {
    TrainConfig best;
    CVReport report;              // report of the best cell
    std::vector<GridCell> cells;  // in expansion order
};

/// Orders two grid cells: better mean score first, then smaller learning
/// rate, smaller J, smaller subsample. Total, so the winner does not depend
/// on enumeration order.
bool cell_precedes(Metric metric, const GridCell& a, const GridCell& b) noexcept;

/// Exhaustive cross-validated search. `inner.folds` is the CV fold count.
GridResult grid_search(const Dataset& data, const GridSpec& grid, const TrainConfig& base,
                       const CVOptions& inner);

/// Outer k-fold evaluation with a grid search inside every training fold;
/// the winner is retrained on the whole training fold and scored on the
/// held-out fold.
CVReport nested_cv(const Dataset& data, const GridSpec& grid, const TrainConfig& base,
                   const CVOptions& outer, std::size_t inner_folds);

struct StagedRow {
    std::size_t stage = 0;
    std::size_t active_units = 0;
    double test_metric = 0.0;
    double train_loss = 0.0;
};

/// Test metric of the first m stages for m = 0..T, with the matching
/// training loss from the model's log.
std::vector<StagedRow> staged_curve(const BoostedEnsemble& model, const Dataset& test);
void write_staged_curve_csv(std::ostream& out, const std::vector<StagedRow>& rows, Metric metric);

struct Bounds {
    double x_min = -1.0;
    double x_max = 1.0;
    double y_min = -1.0;
    double y_max = 1.0;
};

/// resolution x resolution grid of model outputs over `bounds`; one row per
/// grid point: x0, x1, then one column per output (p(y=1|x) for binary).
/// Throws ShapeError unless the model takes 2 features.
Matrix boundary_raster(const BoostedEnsemble& model, const Bounds& bounds, std::size_t resolution,
                       std::optional<std::size_t> stages = std::nullopt);
Matrix boundary_raster(const FlatNetwork& net, const Bounds& bounds, std::size_t resolution);
void write_raster_csv(std::ostream& out, const Matrix& raster);

}  // namespace gbnn
