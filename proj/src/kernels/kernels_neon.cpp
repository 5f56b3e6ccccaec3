// AArch64 only; NEON (with float64x2) is baseline there. Same rounding
// contract as the AVX2 variant.
#include <arm_neon.h>

#include "finalize_scalar.hpp"

namespace kidrec::simd {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + k), vld1q_f64(b + k)));
        acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + k + 2), vld1q_f64(b + k + 2)));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; k < n; ++k) s += a[k] * b[k];
    return s;
}

double sum_squares(const double* a, std::size_t n) { return dot(a, a, n); }

void sgd_update(double* p, double* q, std::size_t n, double err, double lr, double reg) {
    const float64x2_t verr = vdupq_n_f64(err);
    const float64x2_t vlr = vdupq_n_f64(lr);
    const float64x2_t vreg = vdupq_n_f64(reg);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t pk = vld1q_f64(p + k);
        const float64x2_t qk = vld1q_f64(q + k);
        const float64x2_t dp = vsubq_f64(vmulq_f64(verr, qk), vmulq_f64(vreg, pk));
        const float64x2_t dq = vsubq_f64(vmulq_f64(verr, pk), vmulq_f64(vreg, qk));
        vst1q_f64(p + k, vaddq_f64(pk, vmulq_f64(vlr, dp)));
        vst1q_f64(q + k, vaddq_f64(qk, vmulq_f64(vlr, dq)));
    }
    for (; k < n; ++k) {
        const double pk = p[k];
        const double qk = q[k];
        p[k] = pk + lr * (err * qk - reg * pk);
        q[k] = qk + lr * (err * pk - reg * qk);
    }
}

// sign(num) * sqrt(min(num^2 / den, 1)), lane by lane.
inline float64x2_t signed_root(float64x2_t num, float64x2_t den) {
    const uint64x2_t sign = vandq_u64(vreinterpretq_u64_f64(num), vdupq_n_u64(0x8000000000000000ULL));
    const float64x2_t r2 = vminq_f64(vdivq_f64(vmulq_f64(num, num), den), vdupq_n_f64(1.0));
    return vreinterpretq_f64_u64(vorrq_u64(vreinterpretq_u64_f64(vsqrtq_f64(r2)), sign));
}

void cosine_finalize(const double* sxy, const double* sxx, const double* syy, const double* count, std::size_t n,
                     double min_overlap, double* out) {
    const float64x2_t vmin = vdupq_n_f64(min_overlap);
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t nan = vdupq_n_f64(detail::kNaN);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t c = vld1q_f64(count + k);
        const float64x2_t xx = vld1q_f64(sxx + k);
        const float64x2_t yy = vld1q_f64(syy + k);
        uint64x2_t ok = vandq_u64(vcgeq_f64(c, vmin), vcgtq_f64(c, zero));
        ok = vandq_u64(ok, vandq_u64(vcgtq_f64(xx, zero), vcgtq_f64(yy, zero)));
        const float64x2_t r = signed_root(vld1q_f64(sxy + k), vmulq_f64(xx, yy));
        vst1q_f64(out + k, vbslq_f64(ok, r, nan));
    }
    for (; k < n; ++k) out[k] = detail::cosine_one(sxy[k], sxx[k], syy[k], count[k], min_overlap);
}

void pearson_finalize(const double* sxy, const double* sx, const double* sy, const double* sxx, const double* syy,
                      const double* count, std::size_t n, double min_overlap, double* out) {
    const float64x2_t vmin = vdupq_n_f64(min_overlap);
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t rel = vdupq_n_f64(kZeroVarianceRel);
    const float64x2_t nan = vdupq_n_f64(detail::kNaN);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t c = vld1q_f64(count + k);
        const float64x2_t x = vld1q_f64(sx + k);
        const float64x2_t y = vld1q_f64(sy + k);
        const float64x2_t xx = vld1q_f64(sxx + k);
        const float64x2_t yy = vld1q_f64(syy + k);
        const float64x2_t cxy = vsubq_f64(vmulq_f64(c, vld1q_f64(sxy + k)), vmulq_f64(x, y));
        const float64x2_t cxx = vsubq_f64(vmulq_f64(c, xx), vmulq_f64(x, x));
        const float64x2_t cyy = vsubq_f64(vmulq_f64(c, yy), vmulq_f64(y, y));
        const float64x2_t relc = vmulq_f64(rel, c);
        uint64x2_t ok = vandq_u64(vcgeq_f64(c, vmin), vcgtq_f64(c, zero));
        ok = vandq_u64(ok, vcgtq_f64(cxx, vmulq_f64(relc, xx)));
        ok = vandq_u64(ok, vcgtq_f64(cyy, vmulq_f64(relc, yy)));
        const float64x2_t r = signed_root(cxy, vmulq_f64(cxx, cyy));
        vst1q_f64(out + k, vbslq_f64(ok, r, nan));
    }
    for (; k < n; ++k) out[k] = detail::pearson_one(sxy[k], sx[k], sy[k], sxx[k], syy[k], count[k], min_overlap);
}

}  // namespace

namespace detail {
const KernelTable kNeonTable{Backend::Neon, dot, sum_squares, sgd_update, cosine_finalize, pearson_finalize};
}  // namespace detail

}  // namespace kidrec::simd
