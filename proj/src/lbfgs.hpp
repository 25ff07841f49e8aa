#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gbnn::detail {

/// f(x) returning the value and writing the gradient into g.
using Objective = std::function<double(std::span<const double> x, std::span<double> g)>;

struct LbfgsOptions {
    std::size_t max_iterations = 200;
    double tolerance = 1e-5;  // relative improvement, two iterations in a row
    std::size_t history = 10;
    std::size_t max_line_search = 25;
};

struct LbfgsResult {
    std::vector<double> x;
    double value = 0.0;
    double initial_value = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool finite = true;  // false if the starting point evaluated non-finite
};

/// Limited-memory BFGS with a strong-Wolfe line search. Every accepted step
/// strictly decreases f, so the result is never worse than `x0`.
LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0, const LbfgsOptions& options);

}  // namespace gbnn::detail
