#include <atomic>
#include <cstdlib>

#include "gbnn/kernels.hpp"

namespace gbnn::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(GBNN_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelSet* find(std::string_view name) noexcept {
    for (const KernelSet* set : available()) {
        if (set->name == name) return set;
    }
    return nullptr;
}

const KernelSet* pick_default() noexcept {
    if (const char* env = std::getenv("GBNN_SIMD")) {
        if (const KernelSet* set = find(env)) return set;
    }
    return available().back();
}

std::atomic<const KernelSet*>& slot() noexcept {
    static std::atomic<const KernelSet*> current{pick_default()};
    return current;
}

}  // namespace

std::vector<const KernelSet*> available() noexcept {
    std::vector<const KernelSet*> sets{&scalar_kernels()};
#if defined(GBNN_HAVE_AVX2_KERNELS)
    if (cpu_has_avx2()) sets.push_back(&avx2_kernels());
#endif
#if defined(GBNN_HAVE_NEON_KERNELS)
    sets.push_back(&neon_kernels());
#endif
    return sets;
}

const KernelSet& active() noexcept { return *slot().load(std::memory_order_relaxed); }

bool select(std::string_view name) noexcept {
    const KernelSet* set = find(name);
    if (set == nullptr) return false;
    slot().store(set, std::memory_order_relaxed);
    return true;
}

}  // namespace gbnn::kernels
