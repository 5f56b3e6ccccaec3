#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops. Every kernel has a scalar reference in
// kernels_scalar.cpp and vector variants selected once at runtime.
//
// Elementwise kernels (sgd_update and the two similarity finalizers) perform
// the same IEEE operations in the same order in every backend and are
// bitwise identical to the scalar reference. Reductions (dot, sum_squares)
// reassociate and agree only to rounding.

namespace kidrec::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view to_string(Backend b);

struct KernelTable {
    Backend backend;

    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum_squares)(const double* a, std::size_t n);

    /// Biased-MF factor step with the pre-update p in q's update:
    ///   p' = p + lr * (err * q - reg * p)
    ///   q' = q + lr * (err * p - reg * q)
    void (*sgd_update)(double* p, double* q, std::size_t n, double err, double lr, double reg);

    /// out[k] = sign(sxy) sqrt(min(sxy^2 / (sxx syy), 1)), i.e. the cosine
    /// sxy / sqrt(sxx syy); NaN when count < min_overlap or a norm is zero.
    void (*cosine_finalize)(const double* sxy, const double* sxx, const double* syy, const double* count,
                            std::size_t n, double min_overlap, double* out);

    /// Pearson from co-rated moment sums via the count-scaled centered sums
    /// C_xy = c sxy - sx sy (likewise C_xx, C_yy), evaluated as
    /// sign(C_xy) sqrt(min(C_xy^2 / (C_xx C_yy), 1)). NaN when
    /// count < min_overlap or either C_xx, C_yy is at most
    /// kZeroVarianceRel c sxx (resp. syy).
    void (*pearson_finalize)(const double* sxy, const double* sx, const double* sy, const double* sxx,
                             const double* syy, const double* count, std::size_t n, double min_overlap,
                             double* out);
};

/// Relative threshold under which a centered sum of squares counts as zero.
inline constexpr double kZeroVarianceRel = 1e-12;

bool available(Backend b);

/// The table for a given backend; throws std::invalid_argument when the
/// CPU (or build) lacks it.
const KernelTable& table(Backend b);

/// The active table. Defaults to the best available backend; the
/// KIDREC_SIMD environment variable (scalar|avx2|neon) overrides.
const KernelTable& active();
void set_active(Backend b);

// Span conveniences over the active table.
inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline double sum_squares(std::span<const double> a) { return active().sum_squares(a.data(), a.size()); }

namespace detail {
extern const KernelTable kScalarTable;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable kAvx2Table;
#endif
#if defined(__aarch64__)
extern const KernelTable kNeonTable;
#endif
}  // namespace detail

}  // namespace kidrec::simd
