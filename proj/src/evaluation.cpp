#include "gbnn/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "gbnn/errors.hpp"
#include "gbnn/random.hpp"

namespace gbnn {

Metric metric_for(const TaskKind& task) noexcept {
    return task.is_classification() ? Metric::Accuracy : Metric::Rmse;
}

std::string metric_name(Metric m) { return m == Metric::Accuracy ? "accuracy" : "rmse"; }

bool metric_better(Metric m, double a, double b) noexcept {
    return m == Metric::Accuracy ? a > b : a < b;
}

std::vector<std::size_t> predicted_classes(const Matrix& predictions, const TaskKind& task) {
    std::vector<std::size_t> classes(predictions.rows());
    for (std::size_t i = 0; i < predictions.rows(); ++i) {
        if (task.loss == LossKind::BinaryLogistic) {
            classes[i] = predictions(i, 0) > 0.5 ? 1 : 0;
        } else {
            const auto row = predictions.row(i);
            classes[i] = static_cast<std::size_t>(std::ranges::max_element(row) - row.begin());
        }
    }
    return classes;
}

namespace {

std::vector<std::size_t> true_classes(const Matrix& targets, const TaskKind& task) {
    std::vector<std::size_t> classes(targets.rows());
    for (std::size_t i = 0; i < targets.rows(); ++i) {
        if (task.loss == LossKind::BinaryLogistic) {
            classes[i] = targets(i, 0) > 0.0 ? 1 : 0;
        } else {
            const auto row = targets.row(i);
            classes[i] = static_cast<std::size_t>(std::ranges::max_element(row) - row.begin());
        }
    }
    return classes;
}

// Runs body(i) for i in [0, n) on up to `threads` workers; the first
// exception is rethrown after all workers finish.
template <typename Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < threads; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct FoldSplit {
    Dataset train;
    Dataset test;
};

FoldSplit split_fold(const Dataset& data, const std::vector<std::vector<std::size_t>>& folds,
                     std::size_t f, bool standardize) {
    std::vector<bool> in_test(data.size(), false);
    for (std::size_t i : folds[f]) in_test[i] = true;
    std::vector<std::size_t> train_rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!in_test[i]) train_rows.push_back(i);
    }
    FoldSplit split{data.subset(train_rows), data.subset(folds[f])};
    if (standardize) {
        // Fitted on the training rows only.
        const Standardizer s = Standardizer::fit(split.train.features);
        split.train.features = s.apply(split.train.features);
        split.test.features = s.apply(split.test.features);
    }
    return split;
}

double train_and_score(const FoldSplit& split, const TrainConfig& config) {
    const BoostedEnsemble model = train(split.train.features, split.train.targets, config);
    return score(predict(model, split.test.features), split.test.targets, config.task);
}

void finish_report(CVReport& report) {
    const auto [mean, sd] = mean_and_stddev(report.fold_metrics);
    report.mean = mean;
    report.stddev = sd;
}

void check_folds(const Dataset& data, std::size_t folds) {
    if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    if (folds > data.size()) {
        throw ConfigError("cannot split " + std::to_string(data.size()) + " rows into " +
                          std::to_string(folds) + " folds");
    }
}

}  // namespace

double score(const Matrix& predictions, const Matrix& targets, const TaskKind& task) {
    if (predictions.rows() != targets.rows()) throw ShapeError("score: row counts differ");
    if (predictions.rows() == 0) throw DataError("score: no rows");
    if (task.loss == LossKind::SquaredError) {
        double sq = 0.0;
        for (std::size_t i = 0; i < targets.rows(); ++i) {
            const double e = predictions(i, 0) - targets(i, 0);
            sq += e * e;
        }
        return std::sqrt(sq / static_cast<double>(targets.rows()));
    }
    const auto predicted = predicted_classes(predictions, task);
    const auto actual = true_classes(targets, task);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == actual[i];
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

std::array<double, 2> mean_and_stddev(const std::vector<double>& values) {
    if (values.empty()) return {0.0, 0.0};
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return {mean, std::sqrt(sq / n)};
}

std::vector<std::vector<std::size_t>> make_folds(const Dataset& data, std::size_t folds,
                                                 std::uint64_t seed,
                                                 std::vector<std::string>* warnings) {
    check_folds(data, folds);
    RandomStream stream(seed);
    std::vector<std::vector<std::size_t>> out(folds);

    std::vector<std::vector<std::size_t>> groups;
    if (data.task().is_classification()) {
        const auto labels = true_classes(data.targets, data.task());
        std::map<std::size_t, std::vector<std::size_t>> by_class;
        for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
        for (auto& [label, rows] : by_class) {
            if (rows.size() < folds) {
                if (warnings != nullptr) {
                    warnings->push_back("class '" + data.class_labels().at(label) + "' has " +
                                        std::to_string(rows.size()) + " members, fewer than " +
                                        std::to_string(folds) +
                                        " folds; using unstratified folds");
                }
                groups.clear();
                break;
            }
            groups.push_back(std::move(rows));
        }
    }
    if (groups.empty()) {
        groups.emplace_back(data.size());
        std::iota(groups.front().begin(), groups.front().end(), std::size_t{0});
    }

    // Dealing each shuffled group round-robin, continuing where the previous
    // group stopped, gives every fold floor or ceil of each group's share.
    std::size_t cursor = 0;
    for (auto& rows : groups) {
        shuffle(rows, stream);
        for (std::size_t i : rows) {
            out[cursor].push_back(i);
            cursor = (cursor + 1) % folds;
        }
    }
    for (auto& fold : out) std::ranges::sort(fold);
    return out;
}

CVReport kfold_cv(const Dataset& data, const TrainConfig& config, const CVOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    CVReport report;
    report.metric = metric_for(config.task);
    const auto folds = make_folds(data, options.folds, options.seed, &report.warnings);

    report.fold_metrics.assign(folds.size(), 0.0);
    parallel_for(folds.size(), options.threads, [&](std::size_t f) {
        report.fold_metrics[f] = train_and_score(split_fold(data, folds, f, options.standardize), config);
    });
    report.chosen.assign(folds.size(), config);
    finish_report(report);
    report.wall_seconds = seconds_since(start);
    return report;
}

CVReport repeated_holdout(const Dataset& data, const TrainConfig& config, std::size_t train_size,
                          std::size_t repeats, const CVOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    if (repeats == 0) throw ConfigError("repeated holdout needs at least 1 repeat");
    if (train_size == 0 || train_size >= data.size()) {
        throw ConfigError("train size must lie in [1, " + std::to_string(data.size() - 1) + "], got " +
                          std::to_string(train_size));
    }
    CVReport report;
    report.metric = metric_for(config.task);
    report.fold_metrics.assign(repeats, 0.0);
    parallel_for(repeats, options.threads, [&](std::size_t r) {
        std::vector<std::size_t> order(data.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        RandomStream stream(child_seed(options.seed, r));
        shuffle(order, stream);
        // Fold 0 is the test part, so split_fold does the standardization.
        std::vector<std::vector<std::size_t>> parts{{order.begin() + static_cast<std::ptrdiff_t>(train_size), order.end()}};
        std::ranges::sort(parts[0]);
        report.fold_metrics[r] = train_and_score(split_fold(data, parts, 0, options.standardize), config);
    });
    report.chosen.assign(repeats, config);
    finish_report(report);
    report.wall_seconds = seconds_since(start);
    return report;
}

GridSpec GridSpec::binary_default() {
    GridSpec g;
    g.learning_rates = {0.1, 0.25, 0.5, 1.0};
    g.subsamples = {0.5, 0.75, 1.0};
    g.units_per_stage = {1, 2, 3};
    return g;
}

GridSpec GridSpec::multiclass_regression_default() {
    GridSpec g;
    g.learning_rates = {0.025, 0.05, 0.1, 0.5, 1.0};
    g.subsamples = {0.25, 0.5, 0.75, 1.0};
    g.units_per_stage = {1, 2, 3, 4};
    return g;
}

GridSpec GridSpec::default_for(const TaskKind& task) {
    return task.loss == LossKind::BinaryLogistic ? binary_default() : multiclass_regression_default();
}

std::vector<TrainConfig> GridSpec::expand(const TrainConfig& base) const {
    if (learning_rates.empty() || subsamples.empty() || units_per_stage.empty()) {
        throw ConfigError("grid has an empty axis");
    }
    std::vector<TrainConfig> out;
    for (double lr : learning_rates) {
        for (double sub : subsamples) {
            for (std::size_t j : units_per_stage) {
                TrainConfig c = base;
                c.learning_rate = lr;
                c.subsample = sub;
                c.units_per_stage = j;
                if (j == 0) throw ConfigError("grid J values must be positive");
                c.stages = units_budget > 0 ? (units_budget + j - 1) / j : stages;
                c.validate();
                out.push_back(c);
            }
        }
    }
    return out;
}

bool cell_precedes(Metric metric, const GridCell& a, const GridCell& b) noexcept {
    if (a.report.mean != b.report.mean) return metric_better(metric, a.report.mean, b.report.mean);
    if (a.config.learning_rate != b.config.learning_rate) {
        return a.config.learning_rate < b.config.learning_rate;
    }
    if (a.config.units_per_stage != b.config.units_per_stage) {
        return a.config.units_per_stage < b.config.units_per_stage;
    }
    if (a.config.subsample != b.config.subsample) return a.config.subsample < b.config.subsample;
    return a.config.stages < b.config.stages;
}

GridResult grid_search(const Dataset& data, const GridSpec& grid, const TrainConfig& base,
                       const CVOptions& inner) {
    const auto start = std::chrono::steady_clock::now();
    const auto configs = grid.expand(base);
    const Metric metric = metric_for(base.task);

    std::vector<std::string> warnings;
    const auto folds = make_folds(data, inner.folds, inner.seed, &warnings);
    std::vector<FoldSplit> splits;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        splits.push_back(split_fold(data, folds, f, inner.standardize));
    }

    // One cell per (configuration, fold) pair.
    const std::size_t cells = configs.size() * folds.size();
    std::vector<double> scores(cells, 0.0);
    parallel_for(cells, inner.threads, [&](std::size_t c) {
        scores[c] = train_and_score(splits[c % folds.size()], configs[c / folds.size()]);
    });

    GridResult result;
    for (std::size_t k = 0; k < configs.size(); ++k) {
        GridCell cell{configs[k], {}};
        cell.report.metric = metric;
        cell.report.fold_metrics.assign(scores.begin() + static_cast<std::ptrdiff_t>(k * folds.size()),
                                        scores.begin() + static_cast<std::ptrdiff_t>((k + 1) * folds.size()));
        cell.report.chosen.assign(folds.size(), configs[k]);
        cell.report.warnings = warnings;
        finish_report(cell.report);
        result.cells.push_back(std::move(cell));
    }
    const auto best = std::ranges::min_element(result.cells, [&](const GridCell& a, const GridCell& b) {
        return cell_precedes(metric, a, b);
    });
    result.best = best->config;
    result.report = best->report;
    result.report.wall_seconds = seconds_since(start);
    return result;
}

CVReport nested_cv(const Dataset& data, const GridSpec& grid, const TrainConfig& base,
                   const CVOptions& outer, std::size_t inner_folds) {
    const auto start = std::chrono::steady_clock::now();
    CVReport report;
    report.metric = metric_for(base.task);
    const auto folds = make_folds(data, outer.folds, outer.seed, &report.warnings);

    for (std::size_t f = 0; f < folds.size(); ++f) {
        FoldSplit raw = split_fold(data, folds, f, false);
        CVOptions inner = outer;
        inner.folds = inner_folds;
        inner.seed = child_seed(outer.seed, f + 1);
        const GridResult search = grid_search(raw.train, grid, base, inner);

        const FoldSplit split = split_fold(data, folds, f, outer.standardize);
        report.fold_metrics.push_back(train_and_score(split, search.best));
        report.chosen.push_back(search.best);
        for (const auto& w : search.report.warnings) report.warnings.push_back(w);
    }
    finish_report(report);
    report.wall_seconds = seconds_since(start);
    return report;
}

std::vector<StagedRow> staged_curve(const BoostedEnsemble& model, const Dataset& test) {
    const TaskKind& task = model.config.task;
    std::vector<StagedRow> rows;
    for_each_stage_margin(model, test.features, [&](std::size_t m, const Matrix& margin) {
        rows.push_back({m, m * model.config.units_per_stage,
                        score(output_transform(margin, task), test.targets, task),
                        model.training_log.at(m)});
    });
    return rows;
}

void write_staged_curve_csv(std::ostream& out, const std::vector<StagedRow>& rows, Metric metric) {
    csv::write_row(out, {"stage", "active_units", "test_" + metric_name(metric), "train_loss"});
    for (const auto& r : rows) {
        csv::write_row(out, {std::to_string(r.stage), std::to_string(r.active_units),
                             csv::format_double(r.test_metric), csv::format_double(r.train_loss)});
    }
}

namespace {

Matrix raster_points(const Bounds& b, std::size_t resolution) {
    if (resolution == 0) throw ConfigError("raster resolution must be at least 1");
    Matrix points(resolution * resolution, 2);
    const double steps = resolution > 1 ? static_cast<double>(resolution - 1) : 1.0;
    for (std::size_t r = 0; r < resolution; ++r) {
        for (std::size_t c = 0; c < resolution; ++c) {
            points(r * resolution + c, 0) = b.x_min + (b.x_max - b.x_min) * static_cast<double>(c) / steps;
            points(r * resolution + c, 1) = b.y_min + (b.y_max - b.y_min) * static_cast<double>(r) / steps;
        }
    }
    return points;
}

Matrix attach(const Matrix& points, const Matrix& values) {
    Matrix out(points.rows(), 2 + values.cols());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        out(i, 0) = points(i, 0);
        out(i, 1) = points(i, 1);
        for (std::size_t k = 0; k < values.cols(); ++k) out(i, 2 + k) = values(i, k);
    }
    return out;
}

}  // namespace

Matrix boundary_raster(const BoostedEnsemble& model, const Bounds& bounds, std::size_t resolution,
                       std::optional<std::size_t> stages) {
    if (model.feature_width != 2) {
        throw ShapeError("boundary raster needs a 2-feature model, got " +
                         std::to_string(model.feature_width));
    }
    const Matrix points = raster_points(bounds, resolution);
    return attach(points, predict(model, points, stages));
}

Matrix boundary_raster(const FlatNetwork& net, const Bounds& bounds, std::size_t resolution) {
    if (net.inputs() != 2) {
        throw ShapeError("boundary raster needs a 2-feature model, got " + std::to_string(net.inputs()));
    }
    const Matrix points = raster_points(bounds, resolution);
    return attach(points, forward(net, points));
}

void write_raster_csv(std::ostream& out, const Matrix& raster) {
    std::vector<std::string> cells{"x0", "x1"};
    if (raster.cols() == 3) {
        cells.emplace_back("p");
    } else {
        for (std::size_t k = 2; k < raster.cols(); ++k) cells.push_back("p" + std::to_string(k - 2));
    }
    csv::write_row(out, cells);
    for (std::size_t i = 0; i < raster.rows(); ++i) {
        cells.clear();
        for (double v : raster.row(i)) cells.push_back(csv::format_double(v));
        csv::write_row(out, cells);
    }
}

}  // namespace gbnn
