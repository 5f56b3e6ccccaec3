#include "kidrec/predictor.hpp"

#include <algorithm>
#include <stdexcept>

namespace kidrec {

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::UU: return "UU";
        case Algorithm::II: return "II";
        case Algorithm::MF: return "MF";
    }
    return "MF";
}

Algorithm parse_algorithm(std::string_view text) {
    if (text == "UU" || text == "uu") return Algorithm::UU;
    if (text == "II" || text == "ii") return Algorithm::II;
    if (text == "MF" || text == "mf") return Algorithm::MF;
    throw std::invalid_argument("unknown algorithm '" + std::string(text) + "'");
}

std::string_view to_string(FallbackStage s) {
    switch (s) {
        case FallbackStage::None: return "none";
        case FallbackStage::ItemMean: return "item_mean";
        case FallbackStage::UserMean: return "user_mean";
        case FallbackStage::GlobalMean: return "global_mean";
    }
    return "none";
}

FallbackStage parse_fallback_stage(std::string_view text) {
    if (text == "item_mean") return FallbackStage::ItemMean;
    if (text == "user_mean") return FallbackStage::UserMean;
    if (text == "global_mean") return FallbackStage::GlobalMean;
    throw std::invalid_argument("unknown fallback stage '" + std::string(text) + "'");
}

std::size_t PredictorConfig::effective_min_overlap() const {
    if (min_overlap > 0) return min_overlap;
    return kind == Algorithm::UU ? 2 : 1;
}

void PredictorConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (!(regularization >= 0.0)) throw std::invalid_argument("regularization must be >= 0");
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (latent_factors < 1) throw std::invalid_argument("latent_factors must be >= 1");
    if (neighborhood_size < 1) throw std::invalid_argument("neighborhood_size must be >= 1");
    if (!(init_scale >= 0.0)) throw std::invalid_argument("init_scale must be >= 0");
    for (auto s : fallback_chain) {
        if (s == FallbackStage::None) throw std::invalid_argument("fallback chain cannot contain 'none'");
    }
}

double clamp_rating(double v) { return std::clamp(v, kMinRating, kMaxRating); }

FallbackValue fallback(const Dataset& train, const UserRef& u, const ItemRef& i, const std::vector<FallbackStage>& chain) {
    if (train.empty()) throw DatasetError("fallback needs a non-empty training set");
    for (auto stage : chain) {
        switch (stage) {
            case FallbackStage::ItemMean:
                if (const auto idx = train.item_index(i)) return {train.item_mean(*idx), stage};
                break;
            case FallbackStage::UserMean:
                if (const auto idx = train.user_index(u)) return {train.user_mean(*idx), stage};
                break;
            case FallbackStage::GlobalMean:
                return {train.global_mean(), stage};
            case FallbackStage::None:
                break;
        }
    }
    return {train.global_mean(), FallbackStage::GlobalMean};
}

Prediction fallback_prediction(const Dataset& train, const UserRef& u, const ItemRef& i, const PredictorConfig& cfg) {
    const auto fb = fallback(train, u, i, cfg.fallback_chain);
    return {cfg.clamp ? clamp_rating(fb.value) : fb.value, false, fb.stage};
}

}  // namespace kidrec
