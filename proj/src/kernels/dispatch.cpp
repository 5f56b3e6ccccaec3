#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kidrec/kernels.hpp"

namespace kidrec::simd {

std::string_view to_string(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "scalar";
}

bool available(Backend b) {
    switch (b) {
        case Backend::Scalar: return true;
        case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::Neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& table(Backend b) {
    if (!available(b)) throw std::invalid_argument("SIMD backend '" + std::string(to_string(b)) + "' unavailable");
    switch (b) {
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::Avx2: return detail::kAvx2Table;
#endif
#if defined(__aarch64__)
        case Backend::Neon: return detail::kNeonTable;
#endif
        default: return detail::kScalarTable;
    }
}

namespace {

const KernelTable* initial_table() {
    if (const char* env = std::getenv("KIDREC_SIMD")) {
        const std::string_view want(env);
        for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
            if (want == to_string(b) && available(b)) return &table(b);
        }
    }
    for (Backend b : {Backend::Avx2, Backend::Neon}) {
        if (available(b)) return &table(b);
    }
    return &detail::kScalarTable;
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> current{initial_table()};
    return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_active(Backend b) { slot().store(&table(b), std::memory_order_release); }

}  // namespace kidrec::simd
