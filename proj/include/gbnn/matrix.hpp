#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace gbnn {

/// Dense row-major matrix of doubles.
///
/// Entry (r, c) lives at `data()[r * cols() + c]`; the serialized form of
/// every matrix in the model format uses the same order.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept {
        return values_[r * cols_ + c];
    }

    std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {values_.data() + r * cols_, cols_};
    }

    double* data() noexcept { return values_.data(); }
    const double* data() const noexcept { return values_.data(); }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Rows picked by `indices`, in that order.
    Matrix select_rows(std::span<const std::size_t> indices) const;
    /// Columns [first, first + count).
    Matrix column_block(std::size_t first, std::size_t count) const;

    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Throws ShapeError unless `m` is rows x cols. `what` prefixes the message.
void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& what);

}  // namespace gbnn
