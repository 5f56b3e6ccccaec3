#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kidrec/dataset.hpp"

namespace kidrec {

enum class Algorithm { UU, II, MF };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view text);

enum class FallbackStage : std::uint8_t { None = 0, ItemMean, UserMean, GlobalMean };

std::string_view to_string(FallbackStage s);
FallbackStage parse_fallback_stage(std::string_view text);

struct PredictorConfig {
    Algorithm kind = Algorithm::MF;

    // UU / II
    std::size_t neighborhood_size = 50;
    std::size_t min_overlap = 0;  // 0 selects the kind default (Pearson 2, cosine 1)
    bool positive_only = false;
    bool full_norms = false;

    // MF
    std::size_t latent_factors = 40;
    double learning_rate = 0.07;
    double regularization = 0.06;
    std::size_t iterations = 100;
    double init_scale = 0.1;
    std::uint64_t seed = 1;

    std::vector<FallbackStage> fallback_chain{FallbackStage::ItemMean, FallbackStage::UserMean, FallbackStage::GlobalMean};
    bool clamp = true;

    std::size_t effective_min_overlap() const;

    /// Throws std::invalid_argument on a violated invariant.
    void validate() const;
};

struct Prediction {
    double value = 0.0;
    /// True iff the model proper produced the value.
    bool served = false;
    FallbackStage fallback_level = FallbackStage::None;
};

double clamp_rating(double v);

/// First stage of `chain` whose statistic is defined for (u, i) in `train`.
/// GlobalMean is always appended as the terminal stage. Throws DatasetError
/// on an empty training set.
struct FallbackValue {
    double value;
    FallbackStage stage;
};
FallbackValue fallback(const Dataset& train, const UserRef& u, const ItemRef& i, const std::vector<FallbackStage>& chain);

/// Applies the fallback chain and clamping to produce an unserved Prediction.
Prediction fallback_prediction(const Dataset& train, const UserRef& u, const ItemRef& i, const PredictorConfig& cfg);

}  // namespace kidrec
