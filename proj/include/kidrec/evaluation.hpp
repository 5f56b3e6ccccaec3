#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kidrec/predictor.hpp"

namespace kidrec {

struct EvalReport {
    double rmse = 0.0;
    std::size_t n = 0;
    double served_user_fraction = 0.0;
    double served_pair_fraction = 0.0;
    std::vector<double> per_pair_sq_errors;
    /// RMSE over served pairs only; 0 when nothing was served.
    double served_rmse = 0.0;
};

/// sqrt(sum (p - t)^2 / n). Throws std::invalid_argument on a length
/// mismatch or empty input.
double rmse(std::span<const double> predictions, std::span<const double> truths);

struct Coverage {
    double users = 0.0;
    double pairs = 0.0;
};

/// Users with at least one served pair over distinct test users, and served
/// pairs over all pairs. Empty input yields (0, 0).
Coverage coverage(std::span<const UserRef> pair_users, std::span<const char> served);

/// Scores predictions aligned with `test`.
EvalReport evaluate(std::span<const Rating> test, std::span<const Prediction> predictions);

struct TTestResult {
    /// False when the differences are constant (up to rounding) but non-zero;
    /// t and p then keep their neutral values 0 and 1.
    bool defined = true;
    double t = 0.0;
    double p = 1.0;
    bool significant_at_05 = false;
    std::size_t n = 0;
    double mean_difference = 0.0;
};

/// Two-sided paired t-test on a[k] - b[k] with n - 1 degrees of freedom.
/// Identical inputs give t = 0, p = 1. Throws std::invalid_argument when the
/// lengths differ or n < 2.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Regularized incomplete beta I_x(a, b), continued fraction (modified
/// Lentz), relative tolerance 1e-10.
double regularized_incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

}  // namespace kidrec
