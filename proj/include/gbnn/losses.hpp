#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gbnn/matrix.hpp"

namespace gbnn {

enum class LossKind { BinaryLogistic, MultiClassCrossEntropy, SquaredError };

/// Loss model plus output dimension.
///
/// Encoded targets are an N x outputs() matrix: a single column of -1/+1
/// for binary tasks, one-hot rows for K-class tasks, one real column for
/// regression.
struct TaskKind {
    LossKind loss = LossKind::SquaredError;
    std::size_t classes = 0;  // 2 for binary, K >= 3 for multi-class, 0 for regression

    static TaskKind binary() { return {LossKind::BinaryLogistic, 2}; }
    static TaskKind multiclass(std::size_t k);
    static TaskKind regression() { return {LossKind::SquaredError, 0}; }

    /// Width of margins, residuals and stage outputs.
    std::size_t outputs() const noexcept {
        return loss == LossKind::MultiClassCrossEntropy ? classes : 1;
    }
    bool is_classification() const noexcept { return loss != LossKind::SquaredError; }

    /// "binary", "multiclass" or "regression".
    std::string name() const;
    /// Inverse of name(); multiclass needs the class count.
    static TaskKind from_name(const std::string& name, std::size_t classes = 0);

    friend bool operator==(const TaskKind&, const TaskKind&) = default;
};

/// Throws DataError if `targets` is not a valid encoding for `kind`.
void validate_targets(const Matrix& targets, const TaskKind& kind);

/// Constant minimizing the summed loss: half log-odds for binary targets,
/// zeros for multi-class, the mean for regression.
/// Throws ConfigError for binary targets containing a single class.
std::vector<double> init_constant(const Matrix& targets, const TaskKind& kind);

/// Negative gradient of the per-instance loss with respect to the margin.
Matrix pseudo_residuals(const Matrix& targets, const Matrix& margin, const TaskKind& kind);

/// One Newton-Raphson step of the line search along `h_outputs`, one value per
/// output. Outputs whose curvature sum is below 1e-12 in magnitude get 0.
std::vector<double> newton_rho(const Matrix& targets, const Matrix& margin,
                               const Matrix& h_outputs, const TaskKind& kind);

/// Mean per-instance loss. Multi-class probabilities are clamped to
/// [1e-12, 1 - 1e-12] here and nowhere else.
double loss_value(const Matrix& targets, const Matrix& margin, const TaskKind& kind);

/// Margins to predictions: p(y=1|x) = 1/(1+exp(-2F)) for binary, softmax rows
/// for multi-class, identity for regression.
Matrix output_transform(const Matrix& margin, const TaskKind& kind);

inline constexpr double kDegenerateCurvature = 1e-12;
inline constexpr double kProbabilityClamp = 1e-12;

}  // namespace gbnn
