#include <doctest.h>

#include <fstream>
#include <typeinfo>
#include <iterator>
#include <sstream>
#include <string>

#include "gbnn/dataset.hpp"
#include "gbnn/errors.hpp"
#include "gbnn/model_io.hpp"
#include "models.hpp"

using namespace gbnn;
using testing::random_matrix;

namespace {

std::string to_text(const EnsembleFile& f) {
    std::ostringstream out;
    write_ensemble(out, f);
    return out.str();
}

std::string to_text(const FlatNetworkFile& f) {
    std::ostringstream out;
    write_flat_network(out, f);
    return out.str();
}

EnsembleFile ensemble_from(const std::string& text) {
    std::istringstream in(text);
    return read_ensemble(in);
}

FlatNetworkFile flat_from(const std::string& text) {
    std::istringstream in(text);
    return read_flat_network(in);
}

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

std::string field_of_failure(const std::string& text) {
    try {
        ensemble_from(text);
    } catch (const LoadError& e) {
        return e.field();
    }
    return "";
}

EnsembleFile sample_file(RandomStream& rng, const TaskKind& task) {
    auto c = testing::random_trained_model(rng, task, 6);
    return EnsembleFile{c.model, std::nullopt};
}

}  // namespace

TEST_CASE("ensemble round trip is exact") {
    RandomStream rng(21);
    for (const TaskKind& task : {TaskKind::binary(), TaskKind::multiclass(3), TaskKind::regression()}) {
        const EnsembleFile f = sample_file(rng, task);
        const std::string text = to_text(f);
        const EnsembleFile back = ensemble_from(text);
        CHECK(back == f);
        CHECK(to_text(back) == text);
        const Matrix probe = random_matrix(20, f.model.feature_width, rng, -5.0, 5.0);
        CHECK(predict(back.model, probe) == predict(f.model, probe));
    }
}

TEST_CASE("flat network round trip is exact, schema included") {
    const Dataset data = ringnorm2d(60, 4);
    TrainConfig c;
    c.task = data.task();
    c.stages = 4;
    c.units_per_stage = 2;
    EnsembleFile ens{train(data.features, data.targets, c), data.schema};
    ens.schema->standardization = Standardizer::fit(data.features);

    const FlatNetworkFile flat = flatten_file(ens);
    const FlatNetworkFile back = flat_from(to_text(flat));
    CHECK(back == flat);
    CHECK(forward(back.net, data.features) == forward(flat.net, data.features));
    CHECK(ensemble_from(to_text(ens)) == ens);
}

TEST_CASE("document fields") {
    RandomStream rng(2);
    const std::string text = to_text(sample_file(rng, TaskKind::regression()));
    for (const char* key : {"\"format_version\": \"1.0\"", "\"task\"", "\"d\"", "\"K_out\"", "\"T\"", "\"J\"",
                            "\"activation\"", "\"train_config\"", "\"training_log\""}) {
        CHECK(text.find(key) != std::string::npos);
    }
    const std::string flat = to_text(flatten_file(sample_file(rng, TaskKind::binary())));
    for (const char* key : {"\"V\"", "\"Omega\"", "\"bias_contribs\"", "\"base_bias\""}) {
        CHECK(flat.find(key) != std::string::npos);
    }
}

TEST_CASE("doubles survive the text form bit for bit") {
    RandomStream rng(5);
    EnsembleFile f = sample_file(rng, TaskKind::regression());
    f.model.f0[0] = 0.1 + 0.2;  // not the double nearest 0.3
    f.model.stages[0].rho_eff[0] = 5e-324;
    f.model.training_log[0] = 1.7976931348623157e308;
    CHECK(ensemble_from(to_text(f)) == f);
}

TEST_CASE("corrupted documents name the offending field") {
    RandomStream rng(8);
    const std::string text = to_text(sample_file(rng, TaskKind::binary()));

    CHECK(field_of_failure(text.substr(0, text.size() / 2)) == "<document>");
    CHECK(field_of_failure("") == "<document>");
    CHECK(field_of_failure("[1, 2]") == "<document>");
    CHECK(field_of_failure(replace_once(text, "\"format_version\": \"1.0\"", "\"format_version\": \"2.0\"")) ==
          "format_version");
    CHECK(field_of_failure(replace_once(text, "\"format_version\": \"1.0\"", "\"format_version\": \"x\"")) ==
          "format_version");
    CHECK(field_of_failure(replace_once(text, "\"kind\": \"ensemble\"", "\"kind\": \"flat_network\"")) == "kind");
    CHECK(field_of_failure(replace_once(text, "\"task\": \"binary\"", "\"task\": \"ordinal\"")) == "task");
    CHECK(field_of_failure(replace_once(text, "\"d\": ", "\"d\": 1")) == "stages[0].V");
    CHECK(field_of_failure(replace_once(text, "\"rows\": ", "\"rows\": 9")) == "stages[0].V");
    CHECK(field_of_failure(replace_once(text, "\"T\": ", "\"T\": 9")) != "");
    CHECK(field_of_failure(replace_once(text, "\"f0\"", "\"f_zero\"")) == "f0");
    CHECK(field_of_failure(replace_once(text, "\"rho_eff\": [", "\"rho_eff\": [\"a\", ")) ==
          "stages[0].rho_eff[0]");
    CHECK(field_of_failure(replace_once(text, "\"learning_rate\": ", "\"learning_rate\": -")) ==
          "train_config");
}

TEST_CASE("a future major version is refused explicitly") {
    RandomStream rng(9);
    const std::string text = replace_once(to_text(sample_file(rng, TaskKind::regression())),
                                          "\"format_version\": \"1.0\"", "\"format_version\": \"2.3\"");
    try {
        ensemble_from(text);
        FAIL("expected a load error");
    } catch (const LoadError& e) {
        CHECK(std::string(e.what()).find("unsupported major version 2") != std::string::npos);
    }
    // A newer minor version of the same major still loads.
    const std::string minor = replace_once(to_text(sample_file(rng, TaskKind::regression())),
                                           "\"format_version\": \"1.0\"", "\"format_version\": \"1.7\"");
    CHECK_NOTHROW(ensemble_from(minor));
}

TEST_CASE("random damage never escapes as anything but a library error") {
    RandomStream rng(10);
    const std::string ens = to_text(sample_file(rng, TaskKind::multiclass(3)));
    const std::string flat = to_text(flatten_file(sample_file(rng, TaskKind::binary())));
    const std::string alphabet = "0123456789-.eE,:[]{}\" xtrue";
    for (const std::string* base : {&ens, &flat}) {
        for (int trial = 0; trial < 1500; ++trial) {
            std::string damaged = *base;
            if (trial % 3 == 0) {
                damaged.resize(rng.below(damaged.size()));
            } else {
                for (int k = 0; k < 1 + trial % 4; ++k) {
                    damaged[rng.below(damaged.size())] = alphabet[rng.below(alphabet.size())];
                }
            }
            try {
                std::istringstream in(damaged);
                if (read_kind(in) == ModelKind::Ensemble) {
                    ensemble_from(damaged);
                } else {
                    flat_from(damaged);
                }
            } catch (const Error&) {
                // expected for most damage
            } catch (const std::exception& e) {
                const std::string what = std::string(typeid(e).name()) + ": " + e.what();
                FAIL(what);
            }
        }
    }
}

TEST_CASE("files on disk") {
    RandomStream rng(11);
    testing::TempDir dir("model-io");
    const EnsembleFile f = sample_file(rng, TaskKind::regression());
    save_ensemble(dir.file("a.json"), f);
    save_ensemble(dir.file("b.json"), f);
    std::ifstream a(dir.file("a.json")), b(dir.file("b.json"));
    CHECK(std::string(std::istreambuf_iterator<char>(a), {}) == std::string(std::istreambuf_iterator<char>(b), {}));
    CHECK(load_ensemble(dir.file("a.json")) == f);
    CHECK(load_kind(dir.file("a.json")) == ModelKind::Ensemble);

    save_flat_network(dir.file("flat.json"), flatten_file(f));
    CHECK(load_kind(dir.file("flat.json")) == ModelKind::FlatNetwork);
    CHECK_THROWS_AS(load_ensemble(dir.file("flat.json")), LoadError);
    CHECK_THROWS_AS(load_ensemble(dir.file("missing.json")), IoError);
}
