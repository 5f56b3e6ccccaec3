#include "kidrec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace kidrec {

double rmse(std::span<const double> predictions, std::span<const double> truths) {
    if (predictions.size() != truths.size()) throw std::invalid_argument("rmse: length mismatch");
    if (predictions.empty()) throw std::invalid_argument("rmse: no pairs");
    double s = 0.0;
    for (std::size_t k = 0; k < predictions.size(); ++k) {
        const double d = predictions[k] - truths[k];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(predictions.size()));
}

Coverage coverage(std::span<const UserRef> pair_users, std::span<const char> served) {
    if (pair_users.size() != served.size()) throw std::invalid_argument("coverage: length mismatch");
    if (pair_users.empty()) return {};
    std::unordered_map<UserRef, bool> user_served;
    std::size_t served_pairs = 0;
    for (std::size_t k = 0; k < pair_users.size(); ++k) {
        auto& flag = user_served[pair_users[k]];
        flag = flag || served[k];
        served_pairs += served[k] ? 1 : 0;
    }
    std::size_t served_users = 0;
    for (const auto& [u, flag] : user_served) served_users += flag ? 1 : 0;
    return {static_cast<double>(served_users) / static_cast<double>(user_served.size()),
            static_cast<double>(served_pairs) / static_cast<double>(pair_users.size())};
}

EvalReport evaluate(std::span<const Rating> test, std::span<const Prediction> predictions) {
    if (test.size() != predictions.size()) throw std::invalid_argument("evaluate: length mismatch");
    if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
    EvalReport r;
    r.n = test.size();
    r.per_pair_sq_errors.resize(test.size());
    std::vector<UserRef> users(test.size());
    std::vector<char> served(test.size());
    double sum = 0.0;
    double served_sum = 0.0;
    std::size_t served_n = 0;
    for (std::size_t k = 0; k < test.size(); ++k) {
        const double d = predictions[k].value - test[k].value;
        r.per_pair_sq_errors[k] = d * d;
        sum += d * d;
        users[k] = test[k].user;
        served[k] = predictions[k].served ? 1 : 0;
        if (predictions[k].served) {
            served_sum += d * d;
            ++served_n;
        }
    }
    r.rmse = std::sqrt(sum / static_cast<double>(r.n));
    r.served_rmse = served_n ? std::sqrt(served_sum / static_cast<double>(served_n)) : 0.0;
    const auto cov = coverage(users, served);
    r.served_user_fraction = cov.users;
    r.served_pair_fraction = cov.pairs;
    return r;
}

namespace {

// Continued fraction for I_x(a, b) (Numerical Recipes betacf, modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kTolerance = 1e-10;
    constexpr int kMaxIterations = 10000;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kTolerance) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete beta needs x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
    if (!(dof > 0.0)) throw std::invalid_argument("degrees of freedom must be > 0");
    if (std::isinf(t)) return 0.0;
    const double x = dof / (dof + t * t);
    return regularized_incomplete_beta(0.5 * dof, 0.5, x);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("paired t-test: length mismatch");
    if (a.size() < 2) throw std::invalid_argument("paired t-test needs at least 2 pairs");
    const std::size_t n = a.size();
    const double nd = static_cast<double>(n);
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) mean += a[k] - b[k];
    mean /= nd;
    double ss = 0.0;
    double max_abs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        max_abs = std::max(max_abs, std::abs(a[k] - b[k]));
        const double d = (a[k] - b[k]) - mean;
        ss += d * d;
    }

    TTestResult r;
    r.n = n;
    r.mean_difference = mean;
    if (max_abs == 0.0) return r;  // identical inputs: t = 0, p = 1
    // Differences equal up to rounding count as zero variance.
    const double tiny = 1e-12 * max_abs;
    if (ss <= nd * tiny * tiny) {
        r.defined = false;
        return r;
    }
    const double sd = std::sqrt(ss / (nd - 1.0));
    r.t = mean / (sd / std::sqrt(nd));
    r.p = student_t_two_sided_p(r.t, nd - 1.0);
    r.significant_at_05 = r.p < 0.05;
    return r;
}

}  // namespace kidrec
