#include "gbnn/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "gbnn/errors.hpp"

namespace gbnn {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols) {
        throw ShapeError("matrix: " + std::to_string(values_.size()) + " values for a " +
                         std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    values_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeError("matrix: ragged initializer list");
        values_.insert(values_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= rows_) throw RangeError("select_rows: row index out of range");
        std::ranges::copy(row(indices[i]), out.row(i).begin());
    }
    return out;
}

Matrix Matrix::column_block(std::size_t first, std::size_t count) const {
    if (first + count > cols_) throw RangeError("column_block: columns out of range");
    Matrix out(rows_, count);
    for (std::size_t r = 0; r < rows_; ++r) {
        auto src = row(r).subspan(first, count);
        std::ranges::copy(src, out.row(r).begin());
    }
    return out;
}

bool Matrix::all_finite() const noexcept {
    return std::ranges::all_of(values_, [](double v) { return std::isfinite(v); });
}

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& what) {
    if (m.rows() != rows || m.cols() != cols) {
        throw ShapeError(what + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                         ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

}  // namespace gbnn
