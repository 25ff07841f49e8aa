#include "gbnn/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "gbnn/errors.hpp"

namespace gbnn {

std::uint64_t RandomStream::below(std::uint64_t bound) {
    // Rejection on the top of the range keeps every residue equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
}

double RandomStream::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t mix_seed(std::uint64_t value) noexcept {
    value += 0x9e3779b97f4a7c15ULL;
    value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
    value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
    return value ^ (value >> 31);
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix_seed(mix_seed(master) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

std::vector<std::size_t> subsample_indices(std::size_t n, double fraction, RandomStream& stream) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ConfigError("subsample fraction must lie in (0, 1], got " + std::to_string(fraction));
    }
    if (n == 0) throw RangeError("subsample_indices: n must be at least 1");

    // The slack keeps products such as 0.3 * 10 = 3.0000000000000004 at 3.
    auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    count = std::clamp<std::size_t>(count, 1, n);

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (count == n) return all;

    // Partial Fisher-Yates: the first `count` slots become the sample.
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(stream.below(n - i));
        std::swap(all[i], all[j]);
    }
    all.resize(count);
    std::ranges::sort(all);
    return all;
}

}  // namespace gbnn
