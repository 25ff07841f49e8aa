#include "gbnn/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gbnn/errors.hpp"

namespace gbnn {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kFormatName = "gbnn-model";

std::string version_string() {
    return std::to_string(kFormatMajor) + "." + std::to_string(kFormatMinor);
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

// ---- writing ---------------------------------------------------------------

json matrix_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"values", m.values()}};
}

json fit_json(const FitConfig& f) {
    return json{{"max_iterations", f.max_iterations},
                {"tolerance", f.tolerance},
                {"init_scale", f.init_scale},
                {"history", f.history},
                {"activation", activation_name(f.activation)}};
}

json config_json(const TrainConfig& c) {
    return json{{"stages", c.stages},
                {"units_per_stage", c.units_per_stage},
                {"learning_rate", c.learning_rate},
                {"subsample", c.subsample},
                {"task", c.task.name()},
                {"classes", c.task.classes},
                {"seed", c.seed},
                {"rho_on_full_data", c.rho_on_full_data},
                {"patience", c.patience},
                {"fit", fit_json(c.fit)}};
}

json schema_json(const FeatureSchema& s) {
    json columns = json::array();
    for (const auto& c : s.columns) {
        columns.push_back(json{{"name", c.name}, {"categorical", c.categorical}, {"levels", c.levels}});
    }
    json standardization = nullptr;
    if (s.standardization) {
        standardization = json{{"mean", s.standardization->mean}, {"scale", s.standardization->scale}};
    }
    return json{{"target", s.target},
                {"task", s.task.name()},
                {"classes", s.task.classes},
                {"class_labels", s.class_labels},
                {"columns", columns},
                {"standardization", standardization}};
}

json header_json(const char* kind, const TaskKind& task, std::size_t d, std::size_t k,
                 std::size_t t, std::size_t j, Activation activation) {
    return json{{"format", kFormatName},
                {"format_version", version_string()},
                {"kind", kind},
                {"task", task.name()},
                {"classes", task.classes},
                {"d", d},
                {"K_out", k},
                {"T", t},
                {"J", j},
                {"activation", activation_name(activation)}};
}

void write_document(std::ostream& out, const json& doc) {
    out << doc.dump(1) << '\n';
    if (!out) throw IoError("failed writing model document");
}

// ---- reading ---------------------------------------------------------------

json parse_document(std::istream& in) {
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        // parse_error for malformed text, out_of_range for numbers beyond double.
        throw LoadError("<document>", std::string("not a readable JSON document (") + e.what() + ")");
    }
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw LoadError(path.empty() ? "<document>" : path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw LoadError(join(path, key), "missing");
    return *it;
}

double as_double(const json& j, const std::string& path) {
    if (!j.is_number()) throw LoadError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw LoadError(path, "not finite");
    return v;
}

std::uint64_t as_u64(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    throw LoadError(path, "expected a non-negative integer");
}

std::size_t as_count(const json& j, const std::string& path) {
    const std::uint64_t v = as_u64(j, path);
    if (v > (std::uint64_t{1} << 40)) throw LoadError(path, "implausibly large");
    return static_cast<std::size_t>(v);
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw LoadError(path, "expected true or false");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw LoadError(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> as_vector(const json& j, const std::string& path) {
    if (!j.is_array()) throw LoadError(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_double(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<double> as_vector(const json& j, const std::string& path, std::size_t expected) {
    auto v = as_vector(j, path);
    if (v.size() != expected) {
        throw LoadError(path, "expected " + std::to_string(expected) + " values, found " +
                                  std::to_string(v.size()));
    }
    return v;
}

std::vector<std::string> as_strings(const json& j, const std::string& path) {
    if (!j.is_array()) throw LoadError(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Matrix as_matrix(const json& j, const std::string& path, std::size_t rows, std::size_t cols) {
    const std::size_t r = as_count(member(j, "rows", path), join(path, "rows"));
    const std::size_t c = as_count(member(j, "cols", path), join(path, "cols"));
    if (r != rows || c != cols) {
        throw LoadError(path, "shape " + std::to_string(r) + "x" + std::to_string(c) +
                                  " disagrees with expected " + std::to_string(rows) + "x" +
                                  std::to_string(cols));
    }
    return Matrix(r, c, as_vector(member(j, "values", path), join(path, "values"), r * c));
}

TaskKind as_task(const json& obj, const std::string& path) {
    const std::string name = as_string(member(obj, "task", path), join(path, "task"));
    const std::size_t classes = as_count(member(obj, "classes", path), join(path, "classes"));
    try {
        TaskKind t = TaskKind::from_name(name, classes);
        if (t.classes != classes) throw ConfigError("class count " + std::to_string(classes) + " invalid for " + name);
        return t;
    } catch (const ConfigError& e) {
        throw LoadError(join(path, "task"), e.what());
    }
}

Activation as_activation(const json& j, const std::string& path) {
    try {
        return activation_from_name(as_string(j, path));
    } catch (const ConfigError& e) {
        throw LoadError(path, e.what());
    }
}

TrainConfig read_config(const json& j, const std::string& path) {
    TrainConfig c;
    c.stages = as_count(member(j, "stages", path), join(path, "stages"));
    c.units_per_stage = as_count(member(j, "units_per_stage", path), join(path, "units_per_stage"));
    c.learning_rate = as_double(member(j, "learning_rate", path), join(path, "learning_rate"));
    c.subsample = as_double(member(j, "subsample", path), join(path, "subsample"));
    c.task = as_task(j, path);
    c.seed = as_u64(member(j, "seed", path), join(path, "seed"));
    c.rho_on_full_data = as_bool(member(j, "rho_on_full_data", path), join(path, "rho_on_full_data"));
    c.patience = as_count(member(j, "patience", path), join(path, "patience"));
    const std::string fp = join(path, "fit");
    const json& f = member(j, "fit", path);
    c.fit.max_iterations = as_count(member(f, "max_iterations", fp), join(fp, "max_iterations"));
    c.fit.tolerance = as_double(member(f, "tolerance", fp), join(fp, "tolerance"));
    c.fit.init_scale = as_double(member(f, "init_scale", fp), join(fp, "init_scale"));
    c.fit.history = as_count(member(f, "history", fp), join(fp, "history"));
    c.fit.activation = as_activation(member(f, "activation", fp), join(fp, "activation"));
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw LoadError(path, e.what());
    }
    return c;
}

std::optional<FeatureSchema> read_schema(const json& doc) {
    const auto it = doc.find("preprocessing");
    if (it == doc.end() || it->is_null()) return std::nullopt;
    const std::string path = "preprocessing";
    const json& j = *it;
    FeatureSchema s;
    s.target = as_string(member(j, "target", path), join(path, "target"));
    s.task = as_task(j, path);
    s.class_labels = as_strings(member(j, "class_labels", path), join(path, "class_labels"));
    const json& cols = member(j, "columns", path);
    if (!cols.is_array()) throw LoadError(join(path, "columns"), "expected an array");
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const std::string cp = join(path, "columns[" + std::to_string(i) + "]");
        ColumnEncoding c;
        c.name = as_string(member(cols[i], "name", cp), join(cp, "name"));
        c.categorical = as_bool(member(cols[i], "categorical", cp), join(cp, "categorical"));
        c.levels = as_strings(member(cols[i], "levels", cp), join(cp, "levels"));
        s.columns.push_back(std::move(c));
    }
    const json& st = member(j, "standardization", path);
    if (!st.is_null()) {
        const std::string sp = join(path, "standardization");
        Standardizer z;
        z.mean = as_vector(member(st, "mean", sp), join(sp, "mean"), s.width());
        z.scale = as_vector(member(st, "scale", sp), join(sp, "scale"), s.width());
        s.standardization = std::move(z);
    }
    return s;
}

struct Header {
    std::string kind;
    TaskKind task;
    std::size_t d, k, t, j;
    Activation activation;
};

Header read_header(const json& doc) {
    const std::string format = as_string(member(doc, "format", ""), "format");
    if (format != kFormatName) throw LoadError("format", "expected '" + std::string(kFormatName) + "'");

    const std::string version = as_string(member(doc, "format_version", ""), "format_version");
    int major = -1;
    int minor = -1;
    char dot = 0;
    std::istringstream vs(version);
    if (!(vs >> major >> dot >> minor) || dot != '.' || !vs.eof()) {
        throw LoadError("format_version", "malformed version '" + version + "'");
    }
    if (major != kFormatMajor) {
        throw LoadError("format_version", "unsupported major version " + std::to_string(major) +
                                              " (this build reads " + std::to_string(kFormatMajor) + ".x)");
    }

    Header h;
    h.kind = as_string(member(doc, "kind", ""), "kind");
    h.task = as_task(doc, "");
    h.d = as_count(member(doc, "d", ""), "d");
    h.k = as_count(member(doc, "K_out", ""), "K_out");
    h.t = as_count(member(doc, "T", ""), "T");
    h.j = as_count(member(doc, "J", ""), "J");
    h.activation = as_activation(member(doc, "activation", ""), "activation");
    if (h.d == 0) throw LoadError("d", "must be positive");
    if (h.j == 0) throw LoadError("J", "must be positive");
    if (h.k != h.task.outputs()) {
        throw LoadError("K_out", "is " + std::to_string(h.k) + " but task " + h.task.name() +
                                     " has " + std::to_string(h.task.outputs()) + " outputs");
    }
    return h;
}

void check_schema(const std::optional<FeatureSchema>& schema, const Header& h) {
    if (schema && schema->width() != h.d) {
        throw LoadError("preprocessing.columns", "encode " + std::to_string(schema->width()) +
                                                     " features, model has d = " + std::to_string(h.d));
    }
}

}  // namespace

void write_ensemble(std::ostream& out, const EnsembleFile& file) {
    const BoostedEnsemble& m = file.model;
    const Activation act = m.stages.empty() ? m.config.fit.activation : m.stages.front().net.activation;
    json doc = header_json("ensemble", m.config.task, m.feature_width, m.outputs(), m.stages.size(),
                           m.config.units_per_stage, act);
    doc["f0"] = m.f0;
    json stages = json::array();
    for (const auto& s : m.stages) {
        stages.push_back(json{{"V", matrix_json(s.net.hidden)},
                              {"W", matrix_json(s.net.output)},
                              {"rho_eff", s.rho_eff}});
    }
    doc["stages"] = std::move(stages);
    doc["train_config"] = config_json(m.config);
    doc["training_log"] = m.training_log;
    doc["preprocessing"] = file.schema ? schema_json(*file.schema) : json(nullptr);
    write_document(out, doc);
}

void write_flat_network(std::ostream& out, const FlatNetworkFile& file) {
    const FlatNetwork& n = file.net;
    json doc = header_json("flat_network", n.task, n.inputs(), n.outputs(), n.stages(),
                           n.units_per_stage, n.activation);
    doc["active_stages"] = n.active_stages;
    doc["V"] = matrix_json(n.hidden);
    doc["Omega"] = matrix_json(n.output);
    doc["bias_contribs"] = matrix_json(n.stage_bias);
    doc["base_bias"] = n.base_bias;
    doc["train_config"] = file.train_config ? config_json(*file.train_config) : json(nullptr);
    doc["training_log"] = file.training_log;
    doc["preprocessing"] = file.schema ? schema_json(*file.schema) : json(nullptr);
    write_document(out, doc);
}

ModelKind read_kind(std::istream& in) {
    const json doc = parse_document(in);
    const Header h = read_header(doc);
    if (h.kind == "ensemble") return ModelKind::Ensemble;
    if (h.kind == "flat_network") return ModelKind::FlatNetwork;
    throw LoadError("kind", "unknown model kind '" + h.kind + "'");
}

EnsembleFile read_ensemble(std::istream& in) {
    const json doc = parse_document(in);
    const Header h = read_header(doc);
    if (h.kind != "ensemble") throw LoadError("kind", "expected 'ensemble', found '" + h.kind + "'");

    EnsembleFile file;
    BoostedEnsemble& m = file.model;
    m.feature_width = h.d;
    m.f0 = as_vector(member(doc, "f0", ""), "f0", h.k);
    m.config = read_config(member(doc, "train_config", ""), "train_config");
    if (m.config.task != h.task) throw LoadError("train_config.task", "disagrees with top-level task");
    if (m.config.units_per_stage != h.j) throw LoadError("train_config.units_per_stage", "disagrees with J");
    if (h.t > m.config.stages) throw LoadError("T", "exceeds train_config.stages");

    const json& stages = member(doc, "stages", "");
    if (!stages.is_array()) throw LoadError("stages", "expected an array");
    if (stages.size() != h.t) {
        throw LoadError("stages", "holds " + std::to_string(stages.size()) + " stages, T = " + std::to_string(h.t));
    }
    for (std::size_t t = 0; t < h.t; ++t) {
        const std::string sp = "stages[" + std::to_string(t) + "]";
        StageModel s;
        s.net.hidden = as_matrix(member(stages[t], "V", sp), join(sp, "V"), h.j, h.d + 1);
        s.net.output = as_matrix(member(stages[t], "W", sp), join(sp, "W"), h.k, h.j + 1);
        s.net.activation = h.activation;
        s.rho_eff = as_vector(member(stages[t], "rho_eff", sp), join(sp, "rho_eff"), h.k);
        m.stages.push_back(std::move(s));
    }
    m.training_log = as_vector(member(doc, "training_log", ""), "training_log", h.t + 1);
    file.schema = read_schema(doc);
    check_schema(file.schema, h);
    return file;
}

FlatNetworkFile read_flat_network(std::istream& in) {
    const json doc = parse_document(in);
    const Header h = read_header(doc);
    if (h.kind != "flat_network") {
        throw LoadError("kind", "expected 'flat_network', found '" + h.kind + "'");
    }
    if (h.t == 0) throw LoadError("T", "a flat network needs at least one stage");

    FlatNetworkFile file;
    FlatNetwork& n = file.net;
    n.task = h.task;
    n.activation = h.activation;
    n.units_per_stage = h.j;
    n.active_stages = as_count(member(doc, "active_stages", ""), "active_stages");
    if (n.active_stages > h.t) throw LoadError("active_stages", "exceeds T");
    n.hidden = as_matrix(member(doc, "V", ""), "V", h.t * h.j, h.d + 1);
    n.output = as_matrix(member(doc, "Omega", ""), "Omega", h.k, h.t * h.j);
    n.stage_bias = as_matrix(member(doc, "bias_contribs", ""), "bias_contribs", h.k, h.t);
    n.base_bias = as_vector(member(doc, "base_bias", ""), "base_bias", h.k);

    const json& cfg = member(doc, "train_config", "");
    if (!cfg.is_null()) file.train_config = read_config(cfg, "train_config");
    file.training_log = as_vector(member(doc, "training_log", ""), "training_log");
    file.schema = read_schema(doc);
    check_schema(file.schema, h);
    return file;
}

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

template <typename Writer, typename File>
void save_with(const std::string& path, const File& file, Writer writer) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    writer(out, file);
}

}  // namespace

void save_ensemble(const std::string& path, const EnsembleFile& file) {
    save_with(path, file, [](std::ostream& o, const EnsembleFile& f) { write_ensemble(o, f); });
}

void save_flat_network(const std::string& path, const FlatNetworkFile& file) {
    save_with(path, file, [](std::ostream& o, const FlatNetworkFile& f) { write_flat_network(o, f); });
}

EnsembleFile load_ensemble(const std::string& path) {
    auto in = open_in(path);
    return read_ensemble(in);
}

FlatNetworkFile load_flat_network(const std::string& path) {
    auto in = open_in(path);
    return read_flat_network(in);
}

ModelKind load_kind(const std::string& path) {
    auto in = open_in(path);
    return read_kind(in);
}

FlatNetworkFile flatten_file(const EnsembleFile& file) {
    return FlatNetworkFile{flatten(file.model), file.model.config, file.model.training_log, file.schema};
}

}  // namespace gbnn
