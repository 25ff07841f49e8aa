#include "gbnn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>

#include "gbnn/errors.hpp"
#include "gbnn/random.hpp"

namespace gbnn {

Standardizer Standardizer::fit(const Matrix& features) {
    const std::size_t n = features.rows();
    const std::size_t d = features.cols();
    Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
    if (n == 0) return s;
    for (std::size_t c = 0; c < d; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += features(i, c);
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) sq += (features(i, c) - mean) * (features(i, c) - mean);
        const double sd = std::sqrt(sq / static_cast<double>(n));
        s.mean[c] = mean;
        s.scale[c] = sd > 1e-12 ? sd : 1.0;
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& features) const {
    if (features.cols() != mean.size()) {
        throw ShapeError("standardizer fitted on " + std::to_string(mean.size()) +
                         " columns, applied to " + std::to_string(features.cols()));
    }
    Matrix out = features;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t c = 0; c < out.cols(); ++c) out(i, c) = (out(i, c) - mean[c]) / scale[c];
    }
    return out;
}

std::size_t FeatureSchema::width() const noexcept {
    std::size_t w = 0;
    for (const auto& c : columns) w += c.width();
    return w;
}

std::vector<std::string> FeatureSchema::feature_names() const {
    std::vector<std::string> names;
    for (const auto& c : columns) {
        if (!c.categorical) {
            names.push_back(c.name);
        } else {
            for (const auto& level : c.levels) names.push_back(c.name + "=" + level);
        }
    }
    return names;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.features = features.select_rows(indices);
    out.targets = targets.select_rows(indices);
    out.raw_targets.reserve(indices.size());
    for (std::size_t i : indices) out.raw_targets.push_back(raw_targets.at(i));
    out.schema = schema;
    return out;
}

TaskHint task_hint_from_name(const std::string& name) {
    if (name == "auto") return TaskHint::Auto;
    if (name == "binary") return TaskHint::Binary;
    if (name == "multiclass") return TaskHint::MultiClass;
    if (name == "regression") return TaskHint::Regression;
    throw ConfigError("unknown task '" + name + "' (expected auto, binary, multiclass or regression)");
}

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "?" || cell == "NA" || cell == "NaN" || cell == "nan";
}

namespace {

bool is_number(const std::string& cell) {
    double v = 0.0;
    return csv::parse_double(cell, v) && std::isfinite(v);
}

// Index of `key` among `header`; falls back to a 0-based numeric index.
std::size_t resolve_column(const std::string& key, const std::vector<std::string>& header,
                           std::size_t width, const char* what) {
    const auto it = std::ranges::find(header, key);
    if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
    double v = 0.0;
    if (csv::parse_double(key, v) && v >= 0.0 && v == std::floor(v) && v < static_cast<double>(width)) {
        return static_cast<std::size_t>(v);
    }
    throw DataError(std::string(what) + " column '" + key + "' not found");
}

double parse_cell(const csv::Table& table, std::size_t row, std::size_t col) {
    double v = 0.0;
    const std::string& cell = table.rows[row][col];
    if (!csv::parse_double(cell, v) || !std::isfinite(v)) {
        throw ParseError(table.line_numbers[row], col + 1, "cannot parse '" + cell + "' as a number");
    }
    return v;
}

}  // namespace

Matrix encode_targets(const std::vector<std::string>& labels, const FeatureSchema& schema) {
    const TaskKind& task = schema.task;
    Matrix targets(labels.size(), task.outputs());
    const auto& classes = schema.class_labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (task.loss == LossKind::SquaredError) {
            double v = 0.0;
            if (!csv::parse_double(labels[i], v) || !std::isfinite(v)) {
                throw DataError("regression target '" + labels[i] + "' is not a number");
            }
            targets(i, 0) = v;
            continue;
        }
        const auto it = std::ranges::find(classes, labels[i]);
        if (it == classes.end()) throw DataError("unknown class label '" + labels[i] + "'");
        const auto k = static_cast<std::size_t>(it - classes.begin());
        if (task.loss == LossKind::BinaryLogistic) {
            targets(i, 0) = k == 1 ? 1.0 : -1.0;
        } else {
            targets(i, k) = 1.0;
        }
    }
    return targets;
}

Dataset load_csv(const std::string& path, const LoadOptions& options) {
    return load_table(csv::read_file(path, options.header, options.delimiter), options);
}

Dataset load_table(const csv::Table& table, const LoadOptions& options) {
    if (table.rows.empty()) throw DataError("dataset has no rows");
    const std::size_t width = table.rows.front().size();
    std::vector<std::string> header = table.header;
    if (header.empty()) {
        for (std::size_t c = 0; c < width; ++c) header.push_back("c" + std::to_string(c));
    }

    const std::size_t target =
        options.target_column.empty() ? width - 1
                                      : resolve_column(options.target_column, header, width, "target");

    std::vector<bool> categorical(width, false);
    for (const auto& key : options.categorical) {
        categorical[resolve_column(key, header, width, "categorical")] = true;
    }

    std::vector<std::size_t> kept;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (std::ranges::none_of(table.rows[r], is_missing)) kept.push_back(r);
    }
    Dataset data;
    data.dropped_rows = table.rows.size() - kept.size();
    if (kept.empty()) throw DataError("dataset is empty after dropping rows with missing values");

    if (options.auto_categorical) {
        for (std::size_t c = 0; c < width; ++c) {
            if (c == target || categorical[c]) continue;
            categorical[c] = std::ranges::any_of(
                kept, [&](std::size_t r) { return !is_number(table.rows[r][c]); });
        }
    }

    FeatureSchema& schema = data.schema;
    schema.target = header[target];
    for (std::size_t c = 0; c < width; ++c) {
        if (c == target) continue;
        ColumnEncoding col{header[c], categorical[c], {}};
        if (col.categorical) {
            for (std::size_t r : kept) {
                const std::string& cell = table.rows[r][c];
                if (std::ranges::find(col.levels, cell) == col.levels.end()) col.levels.push_back(cell);
            }
        }
        schema.columns.push_back(std::move(col));
    }
    if (schema.columns.empty()) throw DataError("dataset has no feature columns");

    // Features.
    data.features = Matrix(kept.size(), schema.width());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const std::size_t r = kept[i];
        std::size_t out = 0;
        std::size_t col_index = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (c == target) continue;
            const ColumnEncoding& col = schema.columns[col_index++];
            if (col.categorical) {
                const auto it = std::ranges::find(col.levels, table.rows[r][c]);
                data.features(i, out + static_cast<std::size_t>(it - col.levels.begin())) = 1.0;
                out += col.levels.size();
            } else {
                data.features(i, out++) = parse_cell(table, r, c);
            }
        }
    }

    // Targets.
    for (std::size_t r : kept) data.raw_targets.push_back(table.rows[r][target]);
    const std::set<std::string> distinct(data.raw_targets.begin(), data.raw_targets.end());
    const bool numeric = std::ranges::all_of(distinct, is_number);

    TaskHint hint = options.task;
    if (hint == TaskHint::Auto) {
        if (distinct.size() == 2) hint = TaskHint::Binary;
        else if (!numeric) hint = TaskHint::MultiClass;
        else hint = TaskHint::Regression;
    }
    switch (hint) {
        case TaskHint::Binary:
            if (distinct.size() != 2) {
                throw DataError("binary task needs exactly 2 target classes, found " +
                                std::to_string(distinct.size()));
            }
            schema.task = TaskKind::binary();
            schema.class_labels.assign(distinct.begin(), distinct.end());
            break;
        case TaskHint::MultiClass:
            if (distinct.size() < 3) {
                throw DataError("multi-class task needs at least 3 target classes, found " +
                                std::to_string(distinct.size()));
            }
            schema.task = TaskKind::multiclass(distinct.size());
            schema.class_labels.assign(distinct.begin(), distinct.end());
            break;
        default:
            for (std::size_t i = 0; i < kept.size(); ++i) parse_cell(table, kept[i], target);
            schema.task = TaskKind::regression();
            break;
    }
    data.targets = encode_targets(data.raw_targets, schema);

    if (options.standardize) {
        schema.standardization = Standardizer::fit(data.features);
        data.features = schema.standardization->apply(data.features);
    }
    return data;
}

Dataset apply_schema(const csv::Table& table, const FeatureSchema& schema) {
    if (table.rows.empty()) throw DataError("input has no rows");
    const std::size_t width = table.rows.front().size();

    // Source column of each schema column, and of the target if present.
    std::vector<std::size_t> source(schema.columns.size());
    std::optional<std::size_t> target;
    if (!table.header.empty()) {
        for (std::size_t k = 0; k < schema.columns.size(); ++k) {
            const auto it = std::ranges::find(table.header, schema.columns[k].name);
            if (it == table.header.end()) {
                throw DataError("input is missing column '" + schema.columns[k].name + "'");
            }
            source[k] = static_cast<std::size_t>(it - table.header.begin());
        }
        const auto it = std::ranges::find(table.header, schema.target);
        if (it != table.header.end()) target = static_cast<std::size_t>(it - table.header.begin());
    } else {
        if (width != schema.columns.size() && width != schema.columns.size() + 1) {
            throw DataError("input has " + std::to_string(width) + " columns, model expects " +
                            std::to_string(schema.columns.size()) + " (plus optional target)");
        }
        for (std::size_t k = 0; k < schema.columns.size(); ++k) source[k] = k;
        if (width == schema.columns.size() + 1) target = width - 1;
    }

    Dataset data;
    data.schema = schema;
    data.features = Matrix(table.rows.size(), schema.width());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::size_t out = 0;
        for (std::size_t k = 0; k < schema.columns.size(); ++k) {
            const ColumnEncoding& col = schema.columns[k];
            const std::string& cell = table.rows[r][source[k]];
            if (col.categorical) {
                const auto it = std::ranges::find(col.levels, cell);
                if (it != col.levels.end()) {
                    data.features(r, out + static_cast<std::size_t>(it - col.levels.begin())) = 1.0;
                }
                out += col.levels.size();
            } else {
                data.features(r, out++) = parse_cell(table, r, source[k]);
            }
        }
        if (target) data.raw_targets.push_back(table.rows[r][*target]);
    }
    if (schema.standardization) data.features = schema.standardization->apply(data.features);
    if (target) {
        try {
            data.targets = encode_targets(data.raw_targets, schema);
        } catch (const DataError&) {
            data.targets = Matrix();  // labels unknown to the model; predictions still usable
        }
    }
    return data;
}

Dataset ringnorm2d(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw ConfigError("ringnorm2d needs at least 2 instances");
    RandomStream stream(seed);
    Dataset data;
    data.features = Matrix(n, 2);
    const double offset = 2.0 / std::numbers::sqrt2;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 2 == 0) {
            data.features(i, 0) = 2.0 * stream.normal();
            data.features(i, 1) = 2.0 * stream.normal();
            data.raw_targets.push_back("1");
        } else {
            data.features(i, 0) = offset + stream.normal();
            data.features(i, 1) = offset + stream.normal();
            data.raw_targets.push_back("-1");
        }
    }
    data.schema.columns = {{"x0", false, {}}, {"x1", false, {}}};
    data.schema.target = "class";
    data.schema.task = TaskKind::binary();
    data.schema.class_labels = {"-1", "1"};
    data.targets = encode_targets(data.raw_targets, data.schema);
    return data;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    std::vector<std::string> cells = data.schema.feature_names();
    cells.push_back(data.schema.target);
    csv::write_row(out, cells);
    for (std::size_t i = 0; i < data.size(); ++i) {
        cells.clear();
        for (double v : data.features.row(i)) cells.push_back(csv::format_double(v));
        cells.push_back(data.raw_targets.at(i));
        csv::write_row(out, cells);
    }
}

}  // namespace gbnn
