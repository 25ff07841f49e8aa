#include "gbnn/losses.hpp"

#include <algorithm>
#include <cmath>

#include "gbnn/errors.hpp"
#include "gbnn/numeric.hpp"

namespace gbnn {

TaskKind TaskKind::multiclass(std::size_t k) {
    if (k < 3) throw ConfigError("multi-class tasks need at least 3 classes, got " + std::to_string(k));
    return {LossKind::MultiClassCrossEntropy, k};
}

std::string TaskKind::name() const {
    switch (loss) {
        case LossKind::BinaryLogistic: return "binary";
        case LossKind::MultiClassCrossEntropy: return "multiclass";
        case LossKind::SquaredError: return "regression";
    }
    return "unknown";
}

TaskKind TaskKind::from_name(const std::string& name, std::size_t classes) {
    if (name == "binary") return binary();
    if (name == "multiclass") return multiclass(classes);
    if (name == "regression") return regression();
    throw ConfigError("unknown task '" + name + "' (expected binary, multiclass or regression)");
}

namespace {

void require_compatible(const Matrix& targets, const Matrix& other, const TaskKind& kind,
                        const char* what) {
    require_shape(targets, targets.rows(), kind.outputs(), "targets");
    require_shape(other, targets.rows(), kind.outputs(), what);
}

}  // namespace

void validate_targets(const Matrix& targets, const TaskKind& kind) {
    if (targets.cols() != kind.outputs()) {
        throw DataError("targets have " + std::to_string(targets.cols()) + " columns, task " +
                        kind.name() + " needs " + std::to_string(kind.outputs()));
    }
    for (std::size_t i = 0; i < targets.rows(); ++i) {
        const auto row = targets.row(i);
        switch (kind.loss) {
            case LossKind::BinaryLogistic:
                if (row[0] != 1.0 && row[0] != -1.0) {
                    throw DataError("binary target on row " + std::to_string(i) + " is not -1/+1");
                }
                break;
            case LossKind::MultiClassCrossEntropy: {
                std::size_t ones = 0;
                for (double v : row) {
                    if (v == 1.0) ++ones;
                    else if (v != 0.0) ones = 2;
                }
                if (ones != 1) throw DataError("row " + std::to_string(i) + " is not one-hot");
                break;
            }
            case LossKind::SquaredError:
                if (!std::isfinite(row[0])) {
                    throw DataError("regression target on row " + std::to_string(i) + " is not finite");
                }
                break;
        }
    }
}

std::vector<double> init_constant(const Matrix& targets, const TaskKind& kind) {
    if (targets.rows() == 0) throw DataError("init_constant: no targets");
    require_shape(targets, targets.rows(), kind.outputs(), "targets");
    const auto n = static_cast<double>(targets.rows());

    switch (kind.loss) {
        case LossKind::BinaryLogistic: {
            double positives = 0.0;
            for (std::size_t i = 0; i < targets.rows(); ++i) positives += targets(i, 0) > 0.0;
            const double negatives = n - positives;
            if (positives == 0.0 || negatives == 0.0) {
                throw ConfigError("degenerate binary targets: only one class present");
            }
            return {0.5 * std::log(positives / negatives)};
        }
        case LossKind::MultiClassCrossEntropy:
            return std::vector<double>(kind.classes, 0.0);
        case LossKind::SquaredError: {
            double sum = 0.0;
            for (std::size_t i = 0; i < targets.rows(); ++i) sum += targets(i, 0);
            return {sum / n};
        }
    }
    return {};
}

Matrix pseudo_residuals(const Matrix& targets, const Matrix& margin, const TaskKind& kind) {
    require_compatible(targets, margin, kind, "margin");
    Matrix r(targets.rows(), kind.outputs());

    for (std::size_t i = 0; i < targets.rows(); ++i) {
        switch (kind.loss) {
            case LossKind::BinaryLogistic: {
                const double y = targets(i, 0);
                // 2y / (1 + exp(2yF)) written through the stable logistic.
                r(i, 0) = 2.0 * y * sigmoid(-2.0 * y * margin(i, 0));
                break;
            }
            case LossKind::MultiClassCrossEntropy: {
                auto out = r.row(i);
                softmax(margin.row(i), out);
                const auto y = targets.row(i);
                for (std::size_t k = 0; k < out.size(); ++k) out[k] = y[k] - out[k];
                break;
            }
            case LossKind::SquaredError:
                r(i, 0) = targets(i, 0) - margin(i, 0);
                break;
        }
    }
    return r;
}

std::vector<double> newton_rho(const Matrix& targets, const Matrix& margin,
                               const Matrix& h_outputs, const TaskKind& kind) {
    require_compatible(targets, margin, kind, "margin");
    require_shape(h_outputs, targets.rows(), kind.outputs(), "stage outputs");

    const std::size_t outs = kind.outputs();
    std::vector<double> numerator(outs, 0.0);
    std::vector<double> denominator(outs, 0.0);
    std::vector<double> p(outs);

    for (std::size_t i = 0; i < targets.rows(); ++i) {
        switch (kind.loss) {
            case LossKind::BinaryLogistic: {
                const double y = targets(i, 0);
                const double h = h_outputs(i, 0);
                const double r = 2.0 * y * sigmoid(-2.0 * y * margin(i, 0));
                numerator[0] += r * h;
                denominator[0] += r * (2.0 * y - r) * h * h;
                break;
            }
            case LossKind::MultiClassCrossEntropy: {
                softmax(margin.row(i), p);
                for (std::size_t k = 0; k < outs; ++k) {
                    const double h = h_outputs(i, k);
                    numerator[k] += h * (targets(i, k) - p[k]);
                    denominator[k] += h * h * p[k] * (1.0 - p[k]);
                }
                break;
            }
            case LossKind::SquaredError: {
                const double h = h_outputs(i, 0);
                numerator[0] += (targets(i, 0) - margin(i, 0)) * h;
                denominator[0] += h * h;
                break;
            }
        }
    }

    std::vector<double> rho(outs, 0.0);
    for (std::size_t k = 0; k < outs; ++k) {
        if (std::abs(denominator[k]) >= kDegenerateCurvature) rho[k] = numerator[k] / denominator[k];
    }
    return rho;
}

double loss_value(const Matrix& targets, const Matrix& margin, const TaskKind& kind) {
    require_compatible(targets, margin, kind, "margin");
    if (targets.rows() == 0) return 0.0;

    double total = 0.0;
    std::vector<double> p(kind.outputs());
    for (std::size_t i = 0; i < targets.rows(); ++i) {
        switch (kind.loss) {
            case LossKind::BinaryLogistic:
                total += log1p_exp(-2.0 * targets(i, 0) * margin(i, 0));
                break;
            case LossKind::MultiClassCrossEntropy:
                softmax(margin.row(i), p);
                for (std::size_t k = 0; k < p.size(); ++k) {
                    if (targets(i, k) != 0.0) {
                        const double clamped = std::clamp(p[k], kProbabilityClamp, 1.0 - kProbabilityClamp);
                        total -= targets(i, k) * std::log(clamped);
                    }
                }
                break;
            case LossKind::SquaredError: {
                const double e = targets(i, 0) - margin(i, 0);
                total += 0.5 * e * e;
                break;
            }
        }
    }
    return total / static_cast<double>(targets.rows());
}

Matrix output_transform(const Matrix& margin, const TaskKind& kind) {
    require_shape(margin, margin.rows(), kind.outputs(), "margin");
    Matrix out = margin;
    switch (kind.loss) {
        case LossKind::BinaryLogistic:
            for (std::size_t i = 0; i < out.rows(); ++i) out(i, 0) = sigmoid(2.0 * margin(i, 0));
            break;
        case LossKind::MultiClassCrossEntropy:
            for (std::size_t i = 0; i < out.rows(); ++i) softmax(margin.row(i), out.row(i));
            break;
        case LossKind::SquaredError:
            break;
    }
    return out;
}

}  // namespace gbnn
