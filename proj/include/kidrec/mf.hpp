#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "kidrec/predictor.hpp"

namespace kidrec {

/// Training produced a non-finite parameter.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t pass, const std::string& what);
    std::size_t pass() const { return pass_; }

private:
    std::size_t pass_;
};

/// Biased matrix factorization: r(u,i) = mu + b_u + b_i + p_u . q_i.
///
/// Users and items are stored in ascending ref order; factor matrices are
/// row-major with `factors` columns.
struct MFModel {
    PredictorConfig config;
    double global_mean = 0.0;
    std::size_t factors = 0;
    std::vector<UserRef> users;
    std::vector<ItemRef> items;
    std::vector<double> user_bias;
    std::vector<double> item_bias;
    std::vector<double> user_factors;
    std::vector<double> item_factors;

    std::optional<std::uint32_t> user_index(const UserRef& u) const;
    std::optional<std::uint32_t> item_index(const ItemRef& i) const;

    std::span<double> p(std::uint32_t u) { return {user_factors.data() + std::size_t(u) * factors, factors}; }
    std::span<double> q(std::uint32_t i) { return {item_factors.data() + std::size_t(i) * factors, factors}; }
    std::span<const double> p(std::uint32_t u) const { return {user_factors.data() + std::size_t(u) * factors, factors}; }
    std::span<const double> q(std::uint32_t i) const { return {item_factors.data() + std::size_t(i) * factors, factors}; }

    bool operator==(const MFModel& other) const;
};

/// Zero biases, factors uniform in (-init_scale, init_scale), mu = training
/// mean. Does not train.
MFModel mf_initialize(const Dataset& train, const PredictorConfig& cfg);

/// T passes of per-rating SGD over a per-pass seeded shuffle of the ratings:
///   e = r - r_hat
///   b_u += lr (e - reg b_u),  b_i += lr (e - reg b_i)
///   p_u += lr (e q_i - reg p_u),  q_i += lr (e p_u - reg q_i)  (pre-update p_u)
/// mu stays at the training mean. When `loss_trace` is given, the
/// regularized loss is appended after every pass.
MFModel mf_train(const Dataset& train, const PredictorConfig& cfg, std::vector<double>* loss_trace = nullptr);

/// Runs passes [0, passes) on an existing model in place.
void mf_run_passes(MFModel& model, const Dataset& train, std::size_t passes, std::vector<double>* loss_trace = nullptr);

/// Unknown user (item) drops b_u and p_u (b_i and q_i); unserved only when
/// both are unknown.
Prediction mf_predict(const MFModel& model, const UserRef& u, const ItemRef& i);

/// sum over ratings of e^2 + reg (b_u^2 + b_i^2 + |p_u|^2 + |q_i|^2).
double mf_loss(const MFModel& model, const Dataset& train);

/// Gradient of mf_loss with respect to every parameter, assembled from the
/// per-rating SGD step (step = -gradient / 2). Layout matches MFModel.
struct MFGradient {
    std::vector<double> user_bias;
    std::vector<double> item_bias;
    std::vector<double> user_factors;
    std::vector<double> item_factors;
};
MFGradient mf_gradient(const MFModel& model, const Dataset& train);

/// Versioned text dump; round-trips every value exactly.
void save_model(std::ostream& out, const MFModel& model);
MFModel load_model(std::istream& in);

}  // namespace kidrec
