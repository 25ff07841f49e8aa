#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "gbnn/losses.hpp"
#include "gbnn/matrix.hpp"
#include "gbnn/random.hpp"

namespace gbnn::testing {

// |a - b| measured against max(|a|, |b|, floor); the floor keeps values
// that cancel to nearly zero from demanding impossible relative accuracy.
inline double relative_gap(double a, double b, double floor = 1.0) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, RandomStream& rng,
                            double lo = -1.0, double hi = 1.0) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (double& v : m.row(i)) v = rng.uniform(lo, hi);
    }
    return m;
}

// Encoded targets for `task`; both binary classes are always present.
inline Matrix random_targets(const TaskKind& task, std::size_t n, RandomStream& rng) {
    Matrix y(n, task.outputs());
    for (std::size_t i = 0; i < n; ++i) {
        switch (task.loss) {
            case LossKind::BinaryLogistic:
                y(i, 0) = i == 0 ? 1.0 : i == 1 ? -1.0 : (rng.below(2) == 0 ? -1.0 : 1.0);
                break;
            case LossKind::MultiClassCrossEntropy:
                y(i, i < task.classes ? i : rng.below(task.classes)) = 1.0;
                break;
            case LossKind::SquaredError:
                y(i, 0) = rng.normal();
                break;
        }
    }
    return y;
}

// Targets with structure a small network can pick up.
inline Matrix smooth_targets(const TaskKind& task, const Matrix& x, RandomStream& rng) {
    Matrix y(x.rows(), task.outputs());
    Matrix w = random_matrix(x.cols(), task.outputs(), rng, -2.0, 2.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double best = -1e300;
        std::size_t arg = 0;
        for (std::size_t k = 0; k < task.outputs(); ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j) * w(j, k);
            s = std::sin(s) + 0.1 * rng.normal();
            if (task.loss == LossKind::SquaredError) y(i, k) = s;
            if (s > best) {
                best = s;
                arg = k;
            }
            if (task.loss == LossKind::BinaryLogistic) y(i, 0) = s > 0.0 ? 1.0 : -1.0;
        }
        if (task.loss == LossKind::MultiClassCrossEntropy) y(i, arg) = 1.0;
    }
    if (task.loss == LossKind::BinaryLogistic) {
        y(0, 0) = 1.0;
        y(1, 0) = -1.0;
    }
    if (task.loss == LossKind::MultiClassCrossEntropy) {
        for (std::size_t k = 0; k < task.classes; ++k) {
            for (std::size_t c = 0; c < task.classes; ++c) y(k, c) = c == k ? 1.0 : 0.0;
        }
    }
    return y;
}

// Fresh scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("gbnn-" + tag + "-" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace gbnn::testing
