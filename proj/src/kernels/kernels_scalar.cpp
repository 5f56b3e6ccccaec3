#include "finalize_scalar.hpp"

namespace kidrec::simd {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
}

double sum_squares(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * a[k];
    return s;
}

void sgd_update(double* p, double* q, std::size_t n, double err, double lr, double reg) {
    for (std::size_t k = 0; k < n; ++k) {
        const double pk = p[k];
        const double qk = q[k];
        p[k] = pk + lr * (err * qk - reg * pk);
        q[k] = qk + lr * (err * pk - reg * qk);
    }
}

void cosine_finalize(const double* sxy, const double* sxx, const double* syy, const double* count, std::size_t n,
                     double min_overlap, double* out) {
    for (std::size_t k = 0; k < n; ++k) out[k] = detail::cosine_one(sxy[k], sxx[k], syy[k], count[k], min_overlap);
}

void pearson_finalize(const double* sxy, const double* sx, const double* sy, const double* sxx, const double* syy,
                      const double* count, std::size_t n, double min_overlap, double* out) {
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = detail::pearson_one(sxy[k], sx[k], sy[k], sxx[k], syy[k], count[k], min_overlap);
    }
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{Backend::Scalar, dot, sum_squares, sgd_update, cosine_finalize, pearson_finalize};
}  // namespace detail

}  // namespace kidrec::simd
