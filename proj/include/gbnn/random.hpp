#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace gbnn {

/// Seedable random stream, reproducible across platforms.
///
/// The engine is std::mt19937_64, whose output sequence the C++ standard
/// pins exactly. The library distributions are not pinned, so uniform,
/// bounded-integer and normal draws are derived here from raw engine words.
/// This algorithm is part of model-format version 1: changing it changes
/// every serialized experiment.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }
    /// Number of engine words consumed so far.
    std::uint64_t position() const noexcept { return position_; }

    std::uint64_t next_u64() {
        ++position_;
        return engine_();
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound), bound > 0, without modulo bias.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via the Box-Muller transform (one draw per call).
    double normal();

private:
    std::uint64_t seed_;
    std::uint64_t position_ = 0;
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t value) noexcept;

/// Seed for sub-stream `index` of `master`, e.g. boosting stage t.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// ceil(fraction * n) distinct indices in [0, n), drawn uniformly without
/// replacement and returned in ascending order.
/// Throws ConfigError when fraction is outside (0, 1] and RangeError when n == 0.
std::vector<std::size_t> subsample_indices(std::size_t n, double fraction, RandomStream& stream);

/// Fisher-Yates shuffle driven by `stream`.
template <typename T>
void shuffle(std::vector<T>& items, RandomStream& stream) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(stream.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace gbnn
