#pragma once

// Per-element similarity finalizers shared by the scalar table and the tails
// of the vector kernels. The vector bodies repeat these operations in the
// same order so every backend rounds identically.
//
// Both return sign(num) * sqrt(min(num^2 / den, 1)). With exact moment sums
// (integer or half-star ratings) num^2 and den are exact, so equal true
// similarities produce bitwise-equal doubles and the neighbor tie rule
// behaves deterministically.

#include <algorithm>
#include <cmath>
#include <limits>

#include "kidrec/kernels.hpp"

namespace kidrec::simd::detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double cosine_one(double sxy, double sxx, double syy, double count, double min_overlap) {
    if (!(count >= min_overlap && count > 0.0 && sxx > 0.0 && syy > 0.0)) return kNaN;
    const double r2 = std::min(sxy * sxy / (sxx * syy), 1.0);
    return std::copysign(std::sqrt(r2), sxy);
}

// Centered sums scaled by the count: C_xy = c sxy - sx sy, and so on.
inline double pearson_one(double sxy, double sx, double sy, double sxx, double syy, double c, double min_overlap) {
    if (!(c >= min_overlap && c > 0.0)) return kNaN;
    const double cxy = c * sxy - sx * sy;
    const double cxx = c * sxx - sx * sx;
    const double cyy = c * syy - sy * sy;
    if (!(cxx > kZeroVarianceRel * c * sxx && cyy > kZeroVarianceRel * c * syy)) return kNaN;
    const double r2 = std::min(cxy * cxy / (cxx * cyy), 1.0);
    return std::copysign(std::sqrt(r2), cxy);
}

}  // namespace kidrec::simd::detail
