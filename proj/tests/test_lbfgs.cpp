#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "lbfgs.hpp"

using gbnn::detail::LbfgsOptions;
using gbnn::detail::minimize_lbfgs;

namespace {

double rosenbrock(std::span<const double> x, std::span<double> g) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
}

}  // namespace

TEST_CASE("Rosenbrock from the classic start") {
    LbfgsOptions opts;
    opts.max_iterations = 500;
    opts.tolerance = 0.0;
    const auto r = minimize_lbfgs(rosenbrock, {-1.2, 1.0}, opts);
    CHECK(r.finite);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.value < 1e-12);
    CHECK(r.initial_value == doctest::Approx(24.2));
}

TEST_CASE("ill-conditioned quadratic") {
    const std::vector<double> scale{1.0, 10.0, 100.0, 1000.0, 1e4};
    auto f = [&](std::span<const double> x, std::span<double> g) {
        double v = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = x[i] - static_cast<double>(i);
            v += 0.5 * scale[i] * e * e;
            g[i] = scale[i] * e;
        }
        return v;
    };
    LbfgsOptions opts;
    opts.tolerance = 0.0;
    const auto r = minimize_lbfgs(f, std::vector<double>(5, 3.0), opts);
    for (std::size_t i = 0; i < 5; ++i) CHECK(r.x[i] == doctest::Approx(static_cast<double>(i)).epsilon(1e-8));
}

TEST_CASE("never returns a point worse than the start") {
    // Flat everywhere: nothing to improve, the start comes back unchanged.
    auto flat = [](std::span<const double>, std::span<double> g) {
        for (double& v : g) v = 0.0;
        return 3.0;
    };
    const auto r = minimize_lbfgs(flat, {1.0, 2.0}, {});
    CHECK(r.value == 3.0);
    CHECK(r.x == std::vector<double>{1.0, 2.0});
}

TEST_CASE("a non-finite start is reported, not optimized") {
    auto bad = [](std::span<const double>, std::span<double> g) {
        for (double& v : g) v = 0.0;
        return std::numeric_limits<double>::quiet_NaN();
    };
    const auto r = minimize_lbfgs(bad, {0.0}, {});
    CHECK_FALSE(r.finite);
}

TEST_CASE("iteration cap is honoured") {
    LbfgsOptions opts;
    opts.max_iterations = 3;
    opts.tolerance = 0.0;
    const auto r = minimize_lbfgs(rosenbrock, {-1.2, 1.0}, opts);
    CHECK(r.iterations <= 3);
    CHECK(r.value < r.initial_value);
}
