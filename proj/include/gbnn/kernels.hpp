#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace gbnn::kernels {

// Inner-loop arithmetic used by the sub-network trainer and the flattened
// network. Each kernel set computes the same functions; only the summation
// order differs, so results agree to rounding (see tests/test_kernels.cpp).

using DotFn = double (*)(const double* a, const double* b, std::size_t n);
using AxpyFn = void (*)(double alpha, const double* x, double* y, std::size_t n);

struct KernelSet {
    std::string_view name;
    DotFn dot;
    AxpyFn axpy;
};

const KernelSet& scalar_kernels() noexcept;
#if defined(GBNN_HAVE_AVX2_KERNELS)
const KernelSet& avx2_kernels() noexcept;
#endif
#if defined(GBNN_HAVE_NEON_KERNELS)
const KernelSet& neon_kernels() noexcept;
#endif

/// Kernel sets this CPU can execute, scalar first.
std::vector<const KernelSet*> available() noexcept;

/// The kernel set used by the library. Picked once on first use: the widest
/// supported set, unless the GBNN_SIMD environment variable names one of
/// `scalar`, `avx2`, `neon`.
const KernelSet& active() noexcept;

/// Overrides the active set for the rest of the process; unknown names are
/// ignored and `false` is returned.
bool select(std::string_view name) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
    return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace gbnn::kernels
