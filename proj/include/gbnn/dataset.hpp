#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbnn/csv.hpp"
#include "gbnn/losses.hpp"
#include "gbnn/matrix.hpp"

namespace gbnn {

/// Per-column z-score transform.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;  // population standard deviation, 1 for constant columns

    static Standardizer fit(const Matrix& features);
    Matrix apply(const Matrix& features) const;

    friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

/// How one raw CSV column maps to feature columns.
struct ColumnEncoding {
    std::string name;
    bool categorical = false;
    std::vector<std::string> levels;  // dummy column order: first appearance

    std::size_t width() const noexcept { return categorical ? levels.size() : 1; }

    friend bool operator==(const ColumnEncoding&, const ColumnEncoding&) = default;
};

/// Everything needed to turn a raw CSV row into model inputs, and model
/// outputs back into labels. Stored alongside trained models.
struct FeatureSchema {
    std::vector<ColumnEncoding> columns;  // input columns, CSV order, target excluded
    std::string target;
    TaskKind task;
    std::vector<std::string> class_labels;  // sorted; binary: [negative, positive]
    std::optional<Standardizer> standardization;

    std::size_t width() const noexcept;
    std::vector<std::string> feature_names() const;

    friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

struct Dataset {
    Matrix features;                      // N x d, standardized iff schema.standardization
    std::vector<std::string> raw_targets;
    Matrix targets;                       // encoded for schema.task
    FeatureSchema schema;
    std::size_t dropped_rows = 0;         // rows removed for missing values

    std::size_t size() const noexcept { return features.rows(); }
    const TaskKind& task() const noexcept { return schema.task; }
    const std::vector<std::string>& class_labels() const noexcept { return schema.class_labels; }

    Dataset subset(std::span<const std::size_t> indices) const;
};

enum class TaskHint { Auto, Binary, MultiClass, Regression };

/// Throws ConfigError for anything other than auto/binary/multiclass/regression.
TaskHint task_hint_from_name(const std::string& name);

struct LoadOptions {
    /// Header name, or 0-based index when the file has no header (or the
    /// name is not found). Empty selects the last column.
    std::string target_column;
    TaskHint task = TaskHint::Auto;
    bool header = true;
    /// Names (or 0-based indices) of columns to dummy-code.
    std::vector<std::string> categorical;
    /// Dummy-code every column holding a non-numeric, non-missing cell.
    bool auto_categorical = false;
    bool standardize = false;
    char delimiter = ',';
};

/// Cells treated as missing: empty, "?", "NA", "NaN", "nan".
bool is_missing(const std::string& cell);

/// Loads a CSV dataset. Rows with a missing cell are dropped and counted.
/// Throws ParseError for a non-numeric cell in a numeric column (addressed
/// by row and column), DataError when no rows remain or targets are
/// unusable for the task.
Dataset load_csv(const std::string& path, const LoadOptions& options);
Dataset load_table(const csv::Table& table, const LoadOptions& options);

/// Encodes raw rows with an existing schema (new data for a trained model).
/// Columns are matched by header name when `table` has a header, otherwise
/// by position. Unseen categorical levels encode as all-zero dummies.
/// The target column is optional here.
Dataset apply_schema(const csv::Table& table, const FeatureSchema& schema);

/// Encodes string labels for `schema.task`: -1/+1 by sorted label order for
/// binary, one-hot for multi-class, parsed numbers for regression.
Matrix encode_targets(const std::vector<std::string>& labels, const FeatureSchema& schema);

/// Two-dimensional two-Gaussian problem: class "1" ~ N((0,0), 4I) and
/// class "-1" ~ N((sqrt 2, sqrt 2), I), alternating, so the classes are
/// balanced. Deterministic per seed.
Dataset ringnorm2d(std::size_t n, std::uint64_t seed);

/// Writes features and raw target as CSV with a header row.
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace gbnn
