#pragma once

#include <stdexcept>
#include <string>

namespace gbnn {

/// Base of every error the library throws. `code()` is a stable
/// machine-readable tag used by the CLI error line.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Invalid hyper-parameters or degenerate training targets.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config_error", message) {}
};

/// Operand shapes do not agree.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& message) : Error("shape_error", message) {}
};

/// An index or count is outside its allowed range.
class RangeError : public Error {
public:
    explicit RangeError(const std::string& message) : Error("range_error", message) {}
};

/// The base learner produced a non-finite loss.
class TrainingDiverged : public Error {
public:
    explicit TrainingDiverged(const std::string& message)
        : Error("training_diverged", message) {}
};

/// Malformed input data (CSV cells, empty datasets).
class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error("data_error", message) {}
};

/// A CSV cell could not be parsed. Row and column are 1-based as shown by
/// a spreadsheet, the row counting the header line when there is one.
class ParseError : public Error {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& message)
        : Error("parse_error", "row " + std::to_string(row) + ", column " +
                                   std::to_string(column) + ": " + message),
          row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// A model file is unreadable. `field()` names the offending entry.
class LoadError : public Error {
public:
    LoadError(std::string field, const std::string& message)
        : Error("load_error", "field '" + field + "': " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io_error", message) {}
};

}  // namespace gbnn
