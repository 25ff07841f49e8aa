#include "gbnn/booster.hpp"

#include <algorithm>
#include <cmath>

#include "gbnn/errors.hpp"
#include "gbnn/random.hpp"

namespace gbnn {

void TrainConfig::validate() const {
    if (stages == 0) throw ConfigError("stages (T) must be at least 1");
    if (units_per_stage == 0) throw ConfigError("units per stage (J) must be at least 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
        throw ConfigError("learning rate must lie in (0, 1], got " + std::to_string(learning_rate));
    }
    if (!(subsample > 0.0 && subsample <= 1.0)) {
        throw ConfigError("subsample must lie in (0, 1], got " + std::to_string(subsample));
    }
    if (fit.max_iterations == 0) throw ConfigError("fit max_iterations must be at least 1");
    if (!(fit.tolerance >= 0.0)) throw ConfigError("fit tolerance must be non-negative");
    if (!(fit.init_scale > 0.0)) throw ConfigError("fit init_scale must be positive");
    if (task.loss == LossKind::MultiClassCrossEntropy && task.classes < 3) {
        throw ConfigError("multi-class task needs at least 3 classes");
    }
}

namespace {

void add_scaled_outputs(Matrix& margin, const Matrix& h, const std::vector<double>& rho) {
    for (std::size_t i = 0; i < margin.rows(); ++i) {
        for (std::size_t k = 0; k < rho.size(); ++k) margin(i, k) += rho[k] * h(i, k);
    }
}

Matrix constant_margin(std::size_t rows, const std::vector<double>& f0) {
    Matrix margin(rows, f0.size());
    for (std::size_t i = 0; i < rows; ++i) std::ranges::copy(f0, margin.row(i).begin());
    return margin;
}

constexpr int kDivergenceRetries = 3;

SubNetwork fit_with_retry(const Matrix& x, const Matrix& r, std::size_t units, FitConfig fit_config,
                          std::uint64_t seed, FitReport& report) {
    for (int attempt = 0;; ++attempt) {
        try {
            return fit(x, r, units, fit_config, seed, &report);
        } catch (const TrainingDiverged&) {
            if (attempt + 1 >= kDivergenceRetries) throw;
            fit_config.init_scale *= 0.5;
        }
    }
}

}  // namespace

BoostedEnsemble train(const Matrix& features, const Matrix& targets, const TrainConfig& config,
                      const StageObserver& observer) {
    config.validate();
    if (features.rows() == 0) throw DataError("train: empty dataset");
    if (features.cols() == 0) throw DataError("train: dataset has no feature columns");
    if (targets.rows() != features.rows()) {
        throw ShapeError("train: " + std::to_string(features.rows()) + " feature rows but " +
                         std::to_string(targets.rows()) + " target rows");
    }
    validate_targets(targets, config.task);
    if (!features.all_finite()) throw DataError("train: features must be finite");

    BoostedEnsemble model;
    model.config = config;
    model.feature_width = features.cols();
    model.f0 = init_constant(targets, config.task);

    const TaskKind& task = config.task;
    Matrix margin = constant_margin(features.rows(), model.f0);
    model.training_log.push_back(loss_value(targets, margin, task));

    double best_loss = model.training_log.back();
    std::size_t stale = 0;

    for (std::size_t t = 1; t <= config.stages; ++t) {
        const std::uint64_t stage_seed = child_seed(config.seed, t);
        RandomStream stream(child_seed(stage_seed, 0));

        const Matrix residuals = pseudo_residuals(targets, margin, task);

        std::vector<std::size_t> rows;
        const bool subsampled = config.subsample < 1.0;
        if (subsampled) rows = subsample_indices(features.rows(), config.subsample, stream);

        FitReport report;
        SubNetwork net = subsampled
            ? fit_with_retry(features.select_rows(rows), residuals.select_rows(rows),
                             config.units_per_stage, config.fit, child_seed(stage_seed, 1), report)
            : fit_with_retry(features, residuals, config.units_per_stage, config.fit,
                             child_seed(stage_seed, 1), report);

        const Matrix h = predict(net, features);
        std::vector<double> rho;
        std::size_t rho_rows = features.rows();
        if (config.rho_on_full_data || !subsampled) {
            rho = newton_rho(targets, margin, h, task);
        } else {
            rho = newton_rho(targets.select_rows(rows), margin.select_rows(rows), h.select_rows(rows),
                             task);
            rho_rows = rows.size();
        }

        StageModel stage{std::move(net), rho};
        for (double& v : stage.rho_eff) v *= config.learning_rate;
        add_scaled_outputs(margin, h, stage.rho_eff);
        model.stages.push_back(std::move(stage));

        const double loss = loss_value(targets, margin, task);
        model.training_log.push_back(loss);

        if (observer) {
            observer(StageEvent{t, subsampled ? rows.size() : features.rows(), rho_rows, rho, loss,
                                report});
        }

        if (config.patience > 0) {
            if (loss < best_loss) {
                best_loss = loss;
                stale = 0;
            } else if (++stale >= config.patience) {
                break;
            }
        }
    }
    return model;
}

void for_each_stage_margin(const BoostedEnsemble& model, const Matrix& features,
                           const std::function<void(std::size_t, const Matrix&)>& visit) {
    if (features.cols() != model.feature_width) {
        throw ShapeError("model expects " + std::to_string(model.feature_width) +
                         " features, got " + std::to_string(features.cols()));
    }
    Matrix margin = constant_margin(features.rows(), model.f0);
    visit(0, margin);
    for (std::size_t t = 0; t < model.stages.size(); ++t) {
        const StageModel& stage = model.stages[t];
        add_scaled_outputs(margin, predict(stage.net, features), stage.rho_eff);
        visit(t + 1, margin);
    }
}

Matrix staged_margins(const BoostedEnsemble& model, const Matrix& features, std::size_t m) {
    if (m > model.stages.size()) {
        throw RangeError("requested " + std::to_string(m) + " stages, model has " +
                         std::to_string(model.stages.size()));
    }
    if (features.cols() != model.feature_width) {
        throw ShapeError("model expects " + std::to_string(model.feature_width) +
                         " features, got " + std::to_string(features.cols()));
    }
    Matrix margin = constant_margin(features.rows(), model.f0);
    for (std::size_t t = 0; t < m; ++t) {
        const StageModel& stage = model.stages[t];
        add_scaled_outputs(margin, predict(stage.net, features), stage.rho_eff);
    }
    return margin;
}

Matrix predict(const BoostedEnsemble& model, const Matrix& features, std::optional<std::size_t> m) {
    return output_transform(staged_margins(model, features, m.value_or(model.stages.size())),
                            model.config.task);
}

}  // namespace gbnn
