// Command-line front end: train, predict, cv, grid, staged-curve, boundary,
// flatten, ringnorm. Results go to stdout (or --out) as CSV or a model file;
// failures print one JSON line to stderr and exit nonzero.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gbnn/csv.hpp"
#include "gbnn/dataset.hpp"
#include "gbnn/errors.hpp"
#include "gbnn/evaluation.hpp"
#include "gbnn/flat_network.hpp"
#include "gbnn/model_io.hpp"

namespace {

using namespace gbnn;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct DataArgs {
    std::string path;
    std::string target_col;
    std::string task = "auto";
    std::vector<std::string> categorical;
    bool auto_categorical = false;
    bool no_header = false;
    bool standardize = false;
};

struct TrainArgs {
    std::size_t stages = 100;
    std::size_t units = 1;
    double learning_rate = 1.0;
    double subsample = 1.0;
    std::uint64_t seed = 0;
    std::string activation = "tanh";
    std::size_t max_iterations = 200;
    std::size_t patience = 0;
    bool rho_on_subsample = false;
};

void add_data_options(CLI::App* app, DataArgs& d, bool standardize_flag) {
    app->add_option("data", d.path, "CSV file")->required();
    app->add_option("--target-col", d.target_col, "target column name or 0-based index (default: last)");
    app->add_option("--task", d.task, "auto, binary, multiclass or regression");
    app->add_option("--categorical", d.categorical, "columns to dummy-code")->delimiter(',');
    app->add_flag("--auto-categorical", d.auto_categorical, "dummy-code every non-numeric column");
    app->add_flag("--no-header", d.no_header, "the CSV has no header row");
    if (standardize_flag) {
        app->add_flag("--standardize", d.standardize, "z-score features (stored with the model)");
    }
}

void add_train_options(CLI::App* app, TrainArgs& t) {
    app->add_option("--stages", t.stages, "boosting stages T");
    app->add_option("--units-per-stage", t.units, "hidden units per stage J");
    app->add_option("--learning-rate", t.learning_rate, "shrinkage in (0, 1]");
    app->add_option("--subsample", t.subsample, "row fraction per stage in (0, 1]");
    app->add_option("--seed", t.seed, "random seed");
    app->add_option("--activation", t.activation, "tanh, logistic or relu");
    app->add_option("--max-iterations", t.max_iterations, "L-BFGS iterations per stage");
    app->add_option("--patience", t.patience, "stop after this many stages without improvement (0 = off)");
    app->add_flag("--rho-on-subsample", t.rho_on_subsample, "line search on the stage subsample only");
}

Dataset load(const DataArgs& d) {
    LoadOptions o;
    o.target_column = d.target_col;
    o.task = task_hint_from_name(d.task);
    o.header = !d.no_header;
    o.categorical = d.categorical;
    o.auto_categorical = d.auto_categorical;
    o.standardize = d.standardize;
    return load_csv(d.path, o);
}

TrainConfig make_config(const TrainArgs& t, const TaskKind& task) {
    TrainConfig c;
    c.stages = t.stages;
    c.units_per_stage = t.units;
    c.learning_rate = t.learning_rate;
    c.subsample = t.subsample;
    c.seed = t.seed;
    c.task = task;
    c.patience = t.patience;
    c.rho_on_full_data = !t.rho_on_subsample;
    c.fit.activation = activation_from_name(t.activation);
    c.fit.max_iterations = t.max_iterations;
    c.validate();
    return c;
}

// Writes to --out when given, else stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw IoError("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        stream().flush();
        if (!stream()) throw IoError("write failed");
    }

private:
    std::ofstream file_;
};

std::size_t stages_for_units(std::size_t units, std::size_t per_stage, std::size_t total_stages) {
    if (units % per_stage != 0) {
        throw RangeError("--active-units " + std::to_string(units) + " is not a multiple of J = " +
                         std::to_string(per_stage));
    }
    const std::size_t m = units / per_stage;
    if (m > total_stages) {
        throw RangeError("--active-units " + std::to_string(units) + " exceeds the model's " +
                         std::to_string(total_stages * per_stage) + " hidden units");
    }
    return m;
}

std::vector<std::string> prediction_header(const TaskKind& task, const std::optional<FeatureSchema>& schema) {
    std::vector<std::string> header;
    if (task.loss == LossKind::BinaryLogistic) {
        header.push_back("p");
    } else if (task.loss == LossKind::MultiClassCrossEntropy) {
        for (std::size_t k = 0; k < task.classes; ++k) {
            header.push_back("p_" + (schema ? schema->class_labels.at(k) : std::to_string(k)));
        }
    } else {
        header.push_back("prediction");
    }
    if (task.is_classification()) header.push_back("label");
    return header;
}

void write_predictions(std::ostream& out, const Matrix& p, const TaskKind& task,
                       const std::optional<FeatureSchema>& schema) {
    csv::write_row(out, prediction_header(task, schema));
    const auto classes = task.is_classification() ? predicted_classes(p, task) : std::vector<std::size_t>{};
    for (std::size_t i = 0; i < p.rows(); ++i) {
        std::vector<std::string> cells;
        for (double v : p.row(i)) cells.push_back(csv::format_double(v));
        if (task.is_classification()) {
            cells.push_back(schema ? schema->class_labels.at(classes[i]) : std::to_string(classes[i]));
        }
        csv::write_row(out, cells);
    }
}

// Features for a stored model: through the stored schema when present,
// otherwise every column of the file is a numeric feature.
Matrix model_inputs(const std::string& path, bool no_header, const std::optional<FeatureSchema>& schema,
                    std::size_t width) {
    const csv::Table table = csv::read_file(path, !no_header);
    if (schema) return apply_schema(table, *schema).features;
    Matrix x(table.rows.size(), width);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (row.size() != width) {
            throw ShapeError("row " + std::to_string(table.line_numbers[i]) + " has " +
                             std::to_string(row.size()) + " cells, model expects " + std::to_string(width));
        }
        for (std::size_t j = 0; j < width; ++j) {
            if (!csv::parse_double(row[j], x(i, j))) {
                throw ParseError(table.line_numbers[i], j + 1, "not a number: '" + row[j] + "'");
            }
        }
    }
    return x;
}

Bounds parse_bounds(const std::vector<double>& v) {
    if (v.size() != 4) throw ConfigError("--bounds takes x_min,x_max,y_min,y_max");
    Bounds b{v[0], v[1], v[2], v[3]};
    if (!(b.x_min < b.x_max) || !(b.y_min < b.y_max)) throw ConfigError("--bounds must be increasing");
    return b;
}

void write_cv_report(std::ostream& out, const CVReport& r) {
    const std::string metric = metric_name(r.metric);
    csv::write_row(out, {"fold", metric, "learning_rate", "subsample", "units_per_stage", "stages"});
    for (std::size_t f = 0; f < r.fold_metrics.size(); ++f) {
        const TrainConfig& c = r.chosen.at(f);
        csv::write_row(out, {std::to_string(f + 1), csv::format_double(r.fold_metrics[f]),
                             csv::format_double(c.learning_rate), csv::format_double(c.subsample),
                             std::to_string(c.units_per_stage), std::to_string(c.stages)});
    }
    csv::write_row(out, {"mean", csv::format_double(r.mean), "", "", "", ""});
    csv::write_row(out, {"stddev", csv::format_double(r.stddev), "", "", "", ""});
}

int fail(const std::string& code, const std::string& message, int status) {
    nlohmann::ordered_json line{{"error", code}, {"message", message}};
    std::cerr << line.dump() << '\n';
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient-boosted shallow neural networks"};
    app.require_subcommand(1);
    std::string out_path;
    std::size_t threads = 1;

    // train
    DataArgs train_data;
    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train an ensemble and write the model file");
    add_data_options(train_cmd, train_data, true);
    add_train_options(train_cmd, train_args);
    train_cmd->add_option("-o,--out", out_path, "model file (default: stdout)");

    // predict
    std::string model_path;
    std::string input_path;
    std::optional<std::size_t> active_units;
    bool predict_no_header = false;
    auto* predict_cmd = app.add_subcommand("predict", "predict with an ensemble or flat-network file");
    predict_cmd->add_option("model", model_path, "model file")->required();
    predict_cmd->add_option("data", input_path, "CSV with feature columns")->required();
    predict_cmd->add_option("--active-units", active_units, "evaluate only the first m hidden units");
    predict_cmd->add_flag("--no-header", predict_no_header, "the CSV has no header row");
    predict_cmd->add_option("-o,--out", out_path, "predictions CSV (default: stdout)");

    // cv
    DataArgs cv_data;
    TrainArgs cv_args;
    std::size_t folds = 10;
    bool no_fold_standardize = false;
    auto* cv_cmd = app.add_subcommand("cv", "k-fold cross-validation of one configuration");
    add_data_options(cv_cmd, cv_data, false);
    add_train_options(cv_cmd, cv_args);
    std::size_t train_size = 0;
    std::size_t repeats = 10;
    auto* folds_opt = cv_cmd->add_option("--folds", folds, "number of folds");
    cv_cmd->add_option("--train-size", train_size, "repeated random splits with this many training rows")
        ->excludes(folds_opt);
    cv_cmd->add_option("--repeats", repeats, "number of random splits for --train-size");
    cv_cmd->add_flag("--raw-features", no_fold_standardize, "skip per-fold standardization");
    cv_cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
    cv_cmd->add_option("-o,--out", out_path, "report CSV (default: stdout)");

    // grid
    DataArgs grid_data;
    TrainArgs grid_args;
    std::vector<double> grid_rates;
    std::vector<double> grid_subsamples;
    std::vector<std::size_t> grid_units;
    std::size_t units_budget = 0;
    std::size_t outer_folds = 0;
    auto* grid_cmd = app.add_subcommand("grid", "cross-validated grid search (nested with --outer-folds)");
    add_data_options(grid_cmd, grid_data, false);
    add_train_options(grid_cmd, grid_args);
    grid_cmd->add_option("--folds", folds, "inner cross-validation folds");
    grid_cmd->add_option("--outer-folds", outer_folds, "run nested CV with this many outer folds");
    grid_cmd->add_option("--grid-learning-rates", grid_rates, "learning-rate axis")->delimiter(',');
    grid_cmd->add_option("--grid-subsamples", grid_subsamples, "subsample axis")->delimiter(',');
    grid_cmd->add_option("--grid-units", grid_units, "J axis")->delimiter(',');
    grid_cmd->add_option("--units-budget", units_budget, "fixed T*J per cell (overrides --stages)");
    grid_cmd->add_flag("--raw-features", no_fold_standardize, "skip per-fold standardization");
    grid_cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
    grid_cmd->add_option("-o,--out", out_path, "report CSV (default: stdout)");

    // staged-curve
    bool curve_no_header = false;
    auto* curve_cmd = app.add_subcommand("staged-curve", "test metric and training loss per stage");
    curve_cmd->add_option("model", model_path, "ensemble file")->required();
    curve_cmd->add_option("data", input_path, "labelled test CSV")->required();
    curve_cmd->add_flag("--no-header", curve_no_header, "the CSV has no header row");
    curve_cmd->add_option("-o,--out", out_path, "curve CSV (default: stdout)");

    // boundary
    std::size_t resolution = 100;
    std::vector<double> bounds_values{-4.0, 6.0, -4.0, 6.0};
    auto* boundary_cmd = app.add_subcommand("boundary", "output raster over a 2-D box");
    boundary_cmd->add_option("model", model_path, "ensemble or flat-network file")->required();
    boundary_cmd->add_option("--resolution", resolution, "grid points per axis");
    boundary_cmd->add_option("--bounds", bounds_values, "x_min,x_max,y_min,y_max")->delimiter(',');
    boundary_cmd->add_option("--active-units", active_units, "evaluate only the first m hidden units");
    boundary_cmd->add_option("-o,--out", out_path, "raster CSV (default: stdout)");

    // flatten
    std::string flat_out;
    auto* flatten_cmd = app.add_subcommand("flatten", "ensemble file -> flat-network file");
    flatten_cmd->add_option("model", model_path, "ensemble file")->required();
    flatten_cmd->add_option("out", flat_out, "flat-network file (default: stdout)");

    // ringnorm
    std::size_t ring_n = 200;
    std::uint64_t ring_seed = 0;
    auto* ring_cmd = app.add_subcommand("ringnorm", "emit the two-Gaussian toy dataset");
    ring_cmd->add_option("-n,--instances", ring_n, "number of instances");
    ring_cmd->add_option("--seed", ring_seed, "random seed");
    ring_cmd->add_option("-o,--out", out_path, "CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        return fail("usage_error", e.what(), kExitUsage);
    }

    try {
        if (*train_cmd) {
            const Dataset data = load(train_data);
            const TrainConfig config = make_config(train_args, data.task());
            EnsembleFile file{train(data.features, data.targets, config), data.schema};
            Output out(out_path);
            write_ensemble(out.stream(), file);
            out.finish();
        } else if (*predict_cmd) {
            Matrix p;
            TaskKind task;
            std::optional<FeatureSchema> schema;
            if (load_kind(model_path) == ModelKind::Ensemble) {
                const EnsembleFile file = load_ensemble(model_path);
                schema = file.schema;
                task = file.model.config.task;
                const Matrix x = model_inputs(input_path, predict_no_header, schema, file.model.feature_width);
                std::optional<std::size_t> m;
                if (active_units) {
                    m = stages_for_units(*active_units, file.model.config.units_per_stage, file.model.stages.size());
                }
                p = predict(file.model, x, m);
            } else {
                FlatNetworkFile file = load_flat_network(model_path);
                schema = file.schema;
                task = file.net.task;
                FlatNetwork net = file.net;
                if (active_units) {
                    net = set_active_stages(std::move(net),
                                            stages_for_units(*active_units, net.units_per_stage, net.stages()));
                }
                p = forward(net, model_inputs(input_path, predict_no_header, schema, net.inputs()));
            }
            Output out(out_path);
            write_predictions(out.stream(), p, task, schema);
            out.finish();
        } else if (*cv_cmd) {
            const Dataset data = load(cv_data);
            const TrainConfig config = make_config(cv_args, data.task());
            CVOptions opts;
            opts.folds = folds;
            opts.seed = cv_args.seed;
            opts.standardize = !no_fold_standardize;
            opts.threads = threads;
            const CVReport report = train_size > 0 ? repeated_holdout(data, config, train_size, repeats, opts)
                                                   : kfold_cv(data, config, opts);
            for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
            Output out(out_path);
            write_cv_report(out.stream(), report);
            out.finish();
        } else if (*grid_cmd) {
            const Dataset data = load(grid_data);
            const TrainConfig base = make_config(grid_args, data.task());
            GridSpec grid = GridSpec::default_for(data.task());
            if (!grid_rates.empty()) grid.learning_rates = grid_rates;
            if (!grid_subsamples.empty()) grid.subsamples = grid_subsamples;
            if (!grid_units.empty()) grid.units_per_stage = grid_units;
            grid.stages = base.stages;
            grid.units_budget = units_budget;
            grid.folds = folds;
            CVOptions opts;
            opts.folds = folds;
            opts.seed = grid_args.seed;
            opts.standardize = !no_fold_standardize;
            opts.threads = threads;
            Output out(out_path);
            if (outer_folds > 0) {
                CVOptions outer = opts;
                outer.folds = outer_folds;
                const CVReport report = nested_cv(data, grid, base, outer, folds);
                for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
                write_cv_report(out.stream(), report);
            } else {
                const GridResult result = grid_search(data, grid, base, opts);
                for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << '\n';
                const std::string metric = metric_name(metric_for(data.task()));
                csv::write_row(out.stream(), {"learning_rate", "subsample", "units_per_stage", "stages",
                                              "mean_" + metric, "stddev_" + metric, "best"});
                for (const auto& cell : result.cells) {
                    const TrainConfig& c = cell.config;
                    csv::write_row(out.stream(),
                                   {csv::format_double(c.learning_rate), csv::format_double(c.subsample),
                                    std::to_string(c.units_per_stage), std::to_string(c.stages),
                                    csv::format_double(cell.report.mean), csv::format_double(cell.report.stddev),
                                    c == result.best ? "1" : "0"});
                }
            }
            out.finish();
        } else if (*curve_cmd) {
            const EnsembleFile file = load_ensemble(model_path);
            if (!file.schema) throw ConfigError("staged-curve needs a model trained from a CSV (no stored schema)");
            const Dataset test = apply_schema(csv::read_file(input_path, !curve_no_header), *file.schema);
            if (test.targets.rows() != test.size()) throw DataError("test CSV has no target column '" + file.schema->target + "'");
            Output out(out_path);
            write_staged_curve_csv(out.stream(), staged_curve(file.model, test), metric_for(file.model.config.task));
            out.finish();
        } else if (*boundary_cmd) {
            const Bounds bounds = parse_bounds(bounds_values);
            Matrix raster;
            if (load_kind(model_path) == ModelKind::Ensemble) {
                const EnsembleFile file = load_ensemble(model_path);
                std::optional<std::size_t> m;
                if (active_units) {
                    m = stages_for_units(*active_units, file.model.config.units_per_stage, file.model.stages.size());
                }
                raster = boundary_raster(file.model, bounds, resolution, m);
            } else {
                FlatNetwork net = load_flat_network(model_path).net;
                if (active_units) {
                    net = set_active_stages(std::move(net),
                                            stages_for_units(*active_units, net.units_per_stage, net.stages()));
                }
                raster = boundary_raster(net, bounds, resolution);
            }
            Output out(out_path);
            write_raster_csv(out.stream(), raster);
            out.finish();
        } else if (*flatten_cmd) {
            const FlatNetworkFile flat = flatten_file(load_ensemble(model_path));
            Output out(flat_out);
            write_flat_network(out.stream(), flat);
            out.finish();
        } else if (*ring_cmd) {
            const Dataset data = ringnorm2d(ring_n, ring_seed);
            Output out(out_path);
            write_dataset_csv(out.stream(), data);
            out.finish();
        }
    } catch (const Error& e) {
        return fail(e.code(), e.what(), kExitFailure);
    } catch (const std::exception& e) {
        return fail("internal_error", e.what(), kExitFailure);
    }
    return 0;
}
