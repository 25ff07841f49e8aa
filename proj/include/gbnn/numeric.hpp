#pragma once

#include <span>
#include <vector>

namespace gbnn {

/// Logistic function 1/(1+exp(-x)); never overflows.
double sigmoid(double x) noexcept;

/// ln(1 + exp(x)) without overflow for large x or precision loss for very negative x.
double log1p_exp(double x) noexcept;

/// Softmax of `v` written to `out` (same length, may alias `v`).
/// Uses max subtraction, so arbitrary finite shifts are safe.
void softmax(std::span<const double> v, std::span<double> out) noexcept;

std::vector<double> softmax(std::span<const double> v);

}  // namespace gbnn
