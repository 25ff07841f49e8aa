#include <doctest.h>

#include <cmath>

#include "gbnn/base_learner.hpp"
#include "gbnn/errors.hpp"
#include "support.hpp"

using namespace gbnn;
using testing::random_matrix;

namespace {

// Central differences of the objective with respect to every weight.
SubNetwork numeric_gradient(const SubNetwork& net, const Matrix& x, const Matrix& y, double h = 1e-6) {
    SubNetwork g = net;
    SubNetwork probe = net;
    for (auto [w, gw] : {std::pair{&probe.hidden, &g.hidden}, std::pair{&probe.output, &g.output}}) {
        for (std::size_t i = 0; i < w->size(); ++i) {
            const double keep = w->data()[i];
            w->data()[i] = keep + h;
            const double up = squared_error_objective(probe, x, y, nullptr);
            w->data()[i] = keep - h;
            const double down = squared_error_objective(probe, x, y, nullptr);
            w->data()[i] = keep;
            gw->data()[i] = (up - down) / (2.0 * h);
        }
    }
    return g;
}

}  // namespace

TEST_CASE("analytic gradient matches finite differences") {
    RandomStream rng(31);
    for (Activation act : {Activation::Tanh, Activation::Logistic}) {
        CAPTURE(activation_name(act));
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t d = 1 + rng.below(6);
            const std::size_t units = 1 + rng.below(4);
            const std::size_t outs = 1 + rng.below(3);
            const std::size_t n = 2 + rng.below(20);
            const SubNetwork net = initialize_network(d, units, outs, act, 1.5, 100 + trial);
            const Matrix x = random_matrix(n, d, rng, -2.0, 2.0);
            const Matrix y = random_matrix(n, outs, rng, -1.0, 1.0);

            SubNetwork analytic;
            squared_error_objective(net, x, y, &analytic);
            const SubNetwork numeric = numeric_gradient(net, x, y);
            for (auto [a, b] : {std::pair{&analytic.hidden, &numeric.hidden},
                                std::pair{&analytic.output, &numeric.output}}) {
                for (std::size_t i = 0; i < a->size(); ++i) {
                    REQUIRE(testing::relative_gap(a->data()[i], b->data()[i], 1e-4) <= 1e-5);
                }
            }
        }
    }
}

TEST_CASE("relu gradient away from the kink") {
    // Inputs well inside the linear pieces so finite differences are exact.
    SubNetwork net{Matrix{{1.0, -0.5, 0.2}, {-1.0, 0.3, 0.1}}, Matrix{{0.7, -1.1, 0.05}}, Activation::Relu};
    const Matrix x{{2.0, 1.0}, {-1.5, 0.5}, {0.8, -2.0}};
    const Matrix y{{0.3}, {-0.2}, {1.0}};
    SubNetwork analytic;
    squared_error_objective(net, x, y, &analytic);
    const SubNetwork numeric = numeric_gradient(net, x, y);
    for (std::size_t i = 0; i < analytic.hidden.size(); ++i) {
        CHECK(analytic.hidden.data()[i] == doctest::Approx(numeric.hidden.data()[i]).epsilon(1e-7));
    }
}

TEST_CASE("zero targets are fitted to near-zero error") {
    RandomStream rng(8);
    const Matrix x = random_matrix(60, 4, rng);
    const Matrix y(60, 2, 0.0);
    FitReport report;
    const SubNetwork net = fit(x, y, 3, FitConfig{}, 1, &report);
    CHECK(mean_squared_error(net, x, y) <= 1e-8);
    CHECK(report.final_mse <= report.initial_mse);
}

TEST_CASE("fit reduces the error on a smooth target") {
    RandomStream rng(12);
    const Matrix x = random_matrix(200, 1, rng, -2.0, 2.0);
    Matrix y(200, 1);
    for (std::size_t i = 0; i < 200; ++i) y(i, 0) = std::sin(1.5 * x(i, 0));
    FitReport report;
    const SubNetwork net = fit(x, y, 3, FitConfig{}, 4, &report);
    CHECK(report.final_mse < 1e-3);
    CHECK(report.final_mse == doctest::Approx(mean_squared_error(net, x, y)).epsilon(1e-12));
    CHECK(report.iterations > 0);
}

TEST_CASE("fit is deterministic per seed") {
    RandomStream rng(2);
    const Matrix x = random_matrix(40, 3, rng);
    const Matrix y = random_matrix(40, 1, rng);
    CHECK(fit(x, y, 2, FitConfig{}, 77) == fit(x, y, 2, FitConfig{}, 77));
    CHECK_FALSE(fit(x, y, 2, FitConfig{}, 77) == fit(x, y, 2, FitConfig{}, 78));
}

TEST_CASE("initialization range") {
    const SubNetwork net = initialize_network(10, 4, 2, Activation::Tanh, 0.5, 3);
    const double hidden_range = 0.5 * std::sqrt(6.0 / 14.0);
    for (double v : net.hidden.values()) CHECK(std::abs(v) <= hidden_range);
    CHECK(net.hidden.rows() == 4);
    CHECK(net.hidden.cols() == 11);
    CHECK(net.output.rows() == 2);
    CHECK(net.output.cols() == 5);
}

TEST_CASE("argument checks") {
    const SubNetwork net = initialize_network(3, 2, 1, Activation::Tanh, 1.0, 0);
    CHECK_THROWS_AS(predict(net, Matrix(4, 2)), ShapeError);
    CHECK_THROWS_AS(fit(Matrix(0, 3), Matrix(0, 1), 2, FitConfig{}, 0), DataError);
    FitConfig bad;
    bad.init_scale = 0.0;
    CHECK_THROWS_AS(fit(Matrix(4, 3), Matrix(4, 1), 2, bad, 0), ConfigError);
    CHECK_THROWS_AS(activation_from_name("softsign"), ConfigError);
    CHECK(activation_from_name("relu") == Activation::Relu);
}
