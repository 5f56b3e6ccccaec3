// Compiled with -mavx2 -mfma -ffp-contract=off; only reached after a CPUID
// check. No FMA intrinsics: elementwise kernels must round like the scalar
// reference.
#include <immintrin.h>

#include "finalize_scalar.hpp"

namespace kidrec::simd {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4)));
    }
    for (; k + 4 <= n; k += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) s += a[k] * b[k];
    return s;
}

double sum_squares(const double* a, std::size_t n) { return dot(a, a, n); }

void sgd_update(double* p, double* q, std::size_t n, double err, double lr, double reg) {
    const __m256d verr = _mm256_set1_pd(err);
    const __m256d vlr = _mm256_set1_pd(lr);
    const __m256d vreg = _mm256_set1_pd(reg);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d pk = _mm256_loadu_pd(p + k);
        const __m256d qk = _mm256_loadu_pd(q + k);
        const __m256d dp = _mm256_sub_pd(_mm256_mul_pd(verr, qk), _mm256_mul_pd(vreg, pk));
        const __m256d dq = _mm256_sub_pd(_mm256_mul_pd(verr, pk), _mm256_mul_pd(vreg, qk));
        _mm256_storeu_pd(p + k, _mm256_add_pd(pk, _mm256_mul_pd(vlr, dp)));
        _mm256_storeu_pd(q + k, _mm256_add_pd(qk, _mm256_mul_pd(vlr, dq)));
    }
    for (; k < n; ++k) {
        const double pk = p[k];
        const double qk = q[k];
        p[k] = pk + lr * (err * qk - reg * pk);
        q[k] = qk + lr * (err * pk - reg * qk);
    }
}

// sign(num) * sqrt(min(num^2 / den, 1)), lane by lane.
inline __m256d signed_root(__m256d num, __m256d den) {
    const __m256d sign = _mm256_and_pd(num, _mm256_set1_pd(-0.0));
    const __m256d r2 = _mm256_min_pd(_mm256_div_pd(_mm256_mul_pd(num, num), den), _mm256_set1_pd(1.0));
    return _mm256_or_pd(_mm256_sqrt_pd(r2), sign);
}

void cosine_finalize(const double* sxy, const double* sxx, const double* syy, const double* count, std::size_t n,
                     double min_overlap, double* out) {
    const __m256d vmin = _mm256_set1_pd(min_overlap);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d nan = _mm256_set1_pd(detail::kNaN);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d c = _mm256_loadu_pd(count + k);
        const __m256d xx = _mm256_loadu_pd(sxx + k);
        const __m256d yy = _mm256_loadu_pd(syy + k);
        __m256d ok = _mm256_and_pd(_mm256_cmp_pd(c, vmin, _CMP_GE_OQ), _mm256_cmp_pd(c, zero, _CMP_GT_OQ));
        ok = _mm256_and_pd(ok, _mm256_and_pd(_mm256_cmp_pd(xx, zero, _CMP_GT_OQ), _mm256_cmp_pd(yy, zero, _CMP_GT_OQ)));
        const __m256d r = signed_root(_mm256_loadu_pd(sxy + k), _mm256_mul_pd(xx, yy));
        _mm256_storeu_pd(out + k, _mm256_blendv_pd(nan, r, ok));
    }
    for (; k < n; ++k) out[k] = detail::cosine_one(sxy[k], sxx[k], syy[k], count[k], min_overlap);
}

void pearson_finalize(const double* sxy, const double* sx, const double* sy, const double* sxx, const double* syy,
                      const double* count, std::size_t n, double min_overlap, double* out) {
    const __m256d vmin = _mm256_set1_pd(min_overlap);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d rel = _mm256_set1_pd(kZeroVarianceRel);
    const __m256d nan = _mm256_set1_pd(detail::kNaN);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d c = _mm256_loadu_pd(count + k);
        const __m256d x = _mm256_loadu_pd(sx + k);
        const __m256d y = _mm256_loadu_pd(sy + k);
        const __m256d xx = _mm256_loadu_pd(sxx + k);
        const __m256d yy = _mm256_loadu_pd(syy + k);
        const __m256d cxy = _mm256_sub_pd(_mm256_mul_pd(c, _mm256_loadu_pd(sxy + k)), _mm256_mul_pd(x, y));
        const __m256d cxx = _mm256_sub_pd(_mm256_mul_pd(c, xx), _mm256_mul_pd(x, x));
        const __m256d cyy = _mm256_sub_pd(_mm256_mul_pd(c, yy), _mm256_mul_pd(y, y));
        const __m256d relc = _mm256_mul_pd(rel, c);
        __m256d ok = _mm256_and_pd(_mm256_cmp_pd(c, vmin, _CMP_GE_OQ), _mm256_cmp_pd(c, zero, _CMP_GT_OQ));
        ok = _mm256_and_pd(ok, _mm256_cmp_pd(cxx, _mm256_mul_pd(relc, xx), _CMP_GT_OQ));
        ok = _mm256_and_pd(ok, _mm256_cmp_pd(cyy, _mm256_mul_pd(relc, yy), _CMP_GT_OQ));
        const __m256d r = signed_root(cxy, _mm256_mul_pd(cxx, cyy));
        _mm256_storeu_pd(out + k, _mm256_blendv_pd(nan, r, ok));
    }
    for (; k < n; ++k) out[k] = detail::pearson_one(sxy[k], sx[k], sy[k], sxx[k], syy[k], count[k], min_overlap);
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table{Backend::Avx2, dot, sum_squares, sgd_update, cosine_finalize, pearson_finalize};
}  // namespace detail

}  // namespace kidrec::simd
