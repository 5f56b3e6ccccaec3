#pragma once

#include <span>
#include <vector>

#include "kidrec/predictor.hpp"

namespace kidrec {

/// User-user KNN, mean-centered:
///   r(u,i) = mean(u) + sum_v sim(u,v) (r(v,i) - mean(v)) / sum_v |sim(u,v)|
/// over the top-k raters of i by Pearson similarity to u. Means are full
/// training means. Falls back when u or i is unknown or no neighbor has
/// non-zero weight.
Prediction uu_predict(const Dataset& train, const UserRef& u, const ItemRef& i, const PredictorConfig& cfg);

/// Item-item KNN:
///   r(u,i) = sum_j sim(i,j) r(u,j) / sum_j |sim(i,j)|
/// over the top-k items rated by u by cosine similarity to i.
Prediction ii_predict(const Dataset& train, const UserRef& u, const ItemRef& i, const PredictorConfig& cfg);

/// Predictions for every test rating at every neighborhood size in `ks`
/// (result[k_index][pair_index]). Computes one similarity row per anchor
/// and shares it across pairs and sizes; value-identical to calling
/// uu_predict / ii_predict pair by pair.
std::vector<std::vector<Prediction>> knn_predict_sweep(const Dataset& train, std::span<const Rating> test,
                                                       const PredictorConfig& cfg, std::span<const std::size_t> ks);

}  // namespace kidrec
