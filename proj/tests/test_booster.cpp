#include <doctest.h>

#include <cmath>
#include <vector>

#include "gbnn/booster.hpp"
#include "gbnn/dataset.hpp"
#include "gbnn/errors.hpp"
#include "gbnn/evaluation.hpp"
#include "support.hpp"

using namespace gbnn;
using testing::random_matrix;
using testing::smooth_targets;

namespace {

TrainConfig config_for(const TaskKind& task, std::size_t stages, std::size_t units = 1) {
    TrainConfig c;
    c.task = task;
    c.stages = stages;
    c.units_per_stage = units;
    c.fit.max_iterations = 50;
    return c;
}

}  // namespace

TEST_CASE("training loss never increases for squared error") {
    RandomStream rng(1234);
    for (int dataset = 0; dataset < 20; ++dataset) {
        CAPTURE(dataset);
        const std::size_t n = 20 + rng.below(60);
        const std::size_t d = 1 + rng.below(5);
        const Matrix x = random_matrix(n, d, rng, -2.0, 2.0);
        const Matrix y = smooth_targets(TaskKind::regression(), x, rng);
        TrainConfig c = config_for(TaskKind::regression(), 15, 1 + rng.below(3));
        c.learning_rate = 0.05 + 0.95 * rng.uniform();
        c.seed = dataset;
        const BoostedEnsemble m = train(x, y, c);
        REQUIRE(m.training_log.size() == 16);
        for (std::size_t t = 1; t < m.training_log.size(); ++t) {
            REQUIRE(m.training_log[t] <= m.training_log[t - 1] + 1e-12);
        }
    }
}

TEST_CASE("training log starts at the constant model's loss") {
    RandomStream rng(5);
    const Matrix x = random_matrix(50, 2, rng);
    const Matrix y = smooth_targets(TaskKind::binary(), x, rng);
    const BoostedEnsemble m = train(x, y, config_for(TaskKind::binary(), 5));
    Matrix f0(50, 1, m.f0[0]);
    CHECK(m.training_log[0] == loss_value(y, f0, TaskKind::binary()));
    CHECK(m.training_log.back() == doctest::Approx(loss_value(y, staged_margins(m, x, 5), TaskKind::binary())));
}

TEST_CASE("line search uses every training row even when subsampling") {
    RandomStream rng(77);
    const Matrix x = random_matrix(90, 3, rng);
    const Matrix y = smooth_targets(TaskKind::multiclass(3), x, rng);
    TrainConfig c = config_for(TaskKind::multiclass(3), 6);
    c.subsample = 0.5;

    std::vector<StageEvent> events;
    train(x, y, c, [&](const StageEvent& e) { events.push_back(e); });
    REQUIRE(events.size() == 6);
    for (const auto& e : events) {
        CHECK(e.fit_rows == 45);
        CHECK(e.rho_rows == 90);
        CHECK(e.rho.size() == 3);
    }

    c.rho_on_full_data = false;
    events.clear();
    train(x, y, c, [&](const StageEvent& e) { events.push_back(e); });
    for (const auto& e : events) CHECK(e.rho_rows == 45);
}

TEST_CASE("stage contributions are shrunk by the learning rate") {
    RandomStream rng(9);
    const Matrix x = random_matrix(40, 2, rng);
    const Matrix y = smooth_targets(TaskKind::regression(), x, rng);
    TrainConfig c = config_for(TaskKind::regression(), 3);
    c.learning_rate = 0.25;
    std::vector<std::vector<double>> raw;
    const BoostedEnsemble m = train(x, y, c, [&](const StageEvent& e) { raw.push_back(e.rho); });
    for (std::size_t t = 0; t < 3; ++t) CHECK(m.stages[t].rho_eff[0] == 0.25 * raw[t][0]);
}

TEST_CASE("training is deterministic per seed") {
    RandomStream rng(10);
    const Matrix x = random_matrix(60, 3, rng);
    const Matrix y = smooth_targets(TaskKind::binary(), x, rng);
    TrainConfig c = config_for(TaskKind::binary(), 5, 2);
    c.subsample = 0.75;
    c.seed = 99;
    CHECK(train(x, y, c) == train(x, y, c));
    TrainConfig other = c;
    other.seed = 100;
    CHECK_FALSE(train(x, y, c) == train(x, y, other));
}

TEST_CASE("staged predictions") {
    RandomStream rng(14);
    const Matrix x = random_matrix(30, 2, rng);
    const Matrix y = smooth_targets(TaskKind::multiclass(4), x, rng);
    const BoostedEnsemble m = train(x, y, config_for(TaskKind::multiclass(4), 4));

    const Matrix zero = staged_margins(m, x, 0);
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t k = 0; k < 4; ++k) CHECK(zero(i, k) == m.f0[k]);
    }
    CHECK(predict(m, x) == predict(m, x, 4));
    CHECK_THROWS_AS(staged_margins(m, x, 5), RangeError);
    CHECK_THROWS_AS(predict(m, Matrix(3, 5)), ShapeError);

    std::size_t visits = 0;
    for_each_stage_margin(m, x, [&](std::size_t t, const Matrix& margin) {
        CHECK(margin == staged_margins(m, x, t));
        ++visits;
    });
    CHECK(visits == 5);
}

TEST_CASE("binary training separates the two-Gaussian problem") {
    const Dataset data = ringnorm2d(400, 3);
    TrainConfig c = config_for(TaskKind::binary(), 30, 2);
    c.learning_rate = 0.5;
    const BoostedEnsemble m = train(data.features, data.targets, c);
    CHECK(score(predict(m, data.features), data.targets, c.task) > 0.8);
}

TEST_CASE("patience stops a stalled run") {
    // Targets that are exactly constant: no stage can improve the loss.
    RandomStream rng(2);
    const Matrix x = random_matrix(20, 2, rng);
    const Matrix y(20, 1, 3.0);
    TrainConfig c = config_for(TaskKind::regression(), 50);
    c.patience = 2;
    const BoostedEnsemble m = train(x, y, c);
    CHECK(m.stages.size() == 2);
    CHECK(m.training_log.size() == 3);
}

TEST_CASE("invalid input is rejected") {
    const Matrix x(10, 2, 0.5);
    Matrix y(10, 1, 1.0);
    y(0, 0) = -1.0;
    TrainConfig c = config_for(TaskKind::binary(), 3);

    SUBCASE("configuration ranges") {
        for (auto mutate : std::vector<void (*)(TrainConfig&)>{
                 [](TrainConfig& t) { t.learning_rate = 0.0; },
                 [](TrainConfig& t) { t.learning_rate = 1.5; },
                 [](TrainConfig& t) { t.subsample = 0.0; },
                 [](TrainConfig& t) { t.subsample = 1.01; },
                 [](TrainConfig& t) { t.stages = 0; },
                 [](TrainConfig& t) { t.units_per_stage = 0; },
             }) {
            TrainConfig bad = c;
            mutate(bad);
            CHECK_THROWS_AS(train(x, y, bad), ConfigError);
        }
    }
    SUBCASE("data") {
        CHECK_THROWS_AS(train(Matrix(0, 2), Matrix(0, 1), c), DataError);
        CHECK_THROWS_AS(train(x, Matrix(9, 1, 1.0), c), ShapeError);
        CHECK_THROWS_AS(train(x, Matrix(10, 1, 1.0), c), ConfigError);  // one class only
        Matrix with_nan = x;
        with_nan(3, 1) = NAN;
        CHECK_THROWS_AS(train(with_nan, y, c), DataError);
        CHECK_THROWS_AS(train(x, Matrix(10, 1, 0.0), c), DataError);  // not -1/+1
    }
}
