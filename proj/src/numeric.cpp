#include "gbnn/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace gbnn {

double sigmoid(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log1p_exp(double x) noexcept {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

void softmax(std::span<const double> v, std::span<double> out) noexcept {
    if (v.empty()) return;
    const double peak = *std::ranges::max_element(v);
    double total = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        out[k] = std::exp(v[k] - peak);
        total += out[k];
    }
    for (double& p : out.first(v.size())) p /= total;
}

std::vector<double> softmax(std::span<const double> v) {
    std::vector<double> out(v.size());
    softmax(v, out);
    return out;
}

}  // namespace gbnn
