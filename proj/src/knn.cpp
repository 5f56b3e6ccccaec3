#include "kidrec/knn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "kidrec/similarity.hpp"

namespace kidrec {

namespace {

struct Candidate {
    Neighbor neighbor;
    double term;  // UU: r(v,i) - mean(v); II: r(u,j)
};

bool candidate_before(const Candidate& a, const Candidate& b) { return neighbor_before(a.neighbor, b.neighbor); }

struct Accumulator {
    double num = 0.0;
    double den = 0.0;
    std::size_t used = 0;

    void take(std::span<const Candidate> sorted, std::size_t k) {
        const std::size_t stop = std::min(k, sorted.size());
        for (; used < stop; ++used) {
            num += sorted[used].neighbor.sim * sorted[used].term;
            den += std::abs(sorted[used].neighbor.sim);
        }
    }
};

Prediction finish(const Accumulator& acc, double offset, const Dataset& train, const Rating& pair, const PredictorConfig& cfg) {
    if (acc.used == 0 || !(acc.den > 0.0)) return fallback_prediction(train, pair.user, pair.item, cfg);
    const double v = offset + acc.num / acc.den;
    return {cfg.clamp ? clamp_rating(v) : v, true, FallbackStage::None};
}

SimilarityOptions options_for(const PredictorConfig& cfg) {
    return {cfg.effective_min_overlap(), cfg.kind == Algorithm::II && cfg.full_norms};
}

void check_kind(const PredictorConfig& cfg, Algorithm want) {
    if (cfg.kind != want) throw std::invalid_argument("predictor config kind mismatch");
}

// Candidates for one pair given the anchor's similarity row.
void uu_candidates(const Dataset& train, std::uint32_t u, std::uint32_t i, std::span<const double> row, bool positive_only,
                   std::vector<Candidate>& out) {
    out.clear();
    for (const auto& e : train.item_ratings(i)) {
        if (e.index == u) continue;
        const double s = row[e.index];
        if (std::isnan(s) || (positive_only && !(s > 0.0))) continue;
        out.push_back({{e.index, s}, e.value - train.user_mean(e.index)});
    }
    std::sort(out.begin(), out.end(), candidate_before);
}

void ii_candidates(const Dataset& train, std::uint32_t u, std::uint32_t i, std::span<const double> row, bool positive_only,
                   std::vector<Candidate>& out) {
    out.clear();
    for (const auto& e : train.user_ratings(u)) {
        if (e.index == i) continue;
        const double s = row[e.index];
        if (std::isnan(s) || (positive_only && !(s > 0.0))) continue;
        out.push_back({{e.index, s}, e.value});
    }
    std::sort(out.begin(), out.end(), candidate_before);
}

}  // namespace

Prediction uu_predict(const Dataset& train, const UserRef& u, const ItemRef& i, const PredictorConfig& cfg) {
    check_kind(cfg, Algorithm::UU);
    const Rating pair{u, i, 0.0, u.ns};
    const auto ui = train.user_index(u);
    const auto ii = train.item_index(i);
    if (!ui || !ii) return fallback_prediction(train, u, i, cfg);

    const auto opts = options_for(cfg);
    std::vector<Candidate> cands;
    for (const auto& e : train.item_ratings(*ii)) {
        if (e.index == *ui) continue;
        const auto s = pearson_users_at(train, *ui, e.index, opts);
        if (!s || (cfg.positive_only && !(*s > 0.0))) continue;
        cands.push_back({{e.index, *s}, e.value - train.user_mean(e.index)});
    }
    std::sort(cands.begin(), cands.end(), candidate_before);
    Accumulator acc;
    acc.take(cands, cfg.neighborhood_size);
    return finish(acc, train.user_mean(*ui), train, pair, cfg);
}

Prediction ii_predict(const Dataset& train, const UserRef& u, const ItemRef& i, const PredictorConfig& cfg) {
    check_kind(cfg, Algorithm::II);
    const Rating pair{u, i, 0.0, u.ns};
    const auto ui = train.user_index(u);
    const auto ii = train.item_index(i);
    if (!ui || !ii) return fallback_prediction(train, u, i, cfg);

    const auto opts = options_for(cfg);
    std::vector<Candidate> cands;
    for (const auto& e : train.user_ratings(*ui)) {
        if (e.index == *ii) continue;
        const auto s = cosine_items_at(train, *ii, e.index, opts);
        if (!s || (cfg.positive_only && !(*s > 0.0))) continue;
        cands.push_back({{e.index, *s}, e.value});
    }
    std::sort(cands.begin(), cands.end(), candidate_before);
    Accumulator acc;
    acc.take(cands, cfg.neighborhood_size);
    return finish(acc, 0.0, train, pair, cfg);
}

std::vector<std::vector<Prediction>> knn_predict_sweep(const Dataset& train, std::span<const Rating> test,
                                                       const PredictorConfig& cfg, std::span<const std::size_t> ks) {
    if (cfg.kind == Algorithm::MF) throw std::invalid_argument("knn_predict_sweep needs a UU or II config");
    for (auto k : ks) {
        if (k < 1) throw std::invalid_argument("neighborhood sizes must be >= 1");
    }
    std::vector<std::size_t> order(ks.size());
    for (std::size_t x = 0; x < order.size(); ++x) order[x] = x;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ks[a] < ks[b]; });

    std::vector<std::vector<Prediction>> out(ks.size(), std::vector<Prediction>(test.size()));
    const bool uu = cfg.kind == Algorithm::UU;

    // Group servable pairs by anchor (user for UU, item for II).
    std::map<std::uint32_t, std::vector<std::size_t>> by_anchor;
    for (std::size_t p = 0; p < test.size(); ++p) {
        const auto ui = train.user_index(test[p].user);
        const auto ii = train.item_index(test[p].item);
        if (!ui || !ii) {
            const auto fb = fallback_prediction(train, test[p].user, test[p].item, cfg);
            for (auto& col : out) col[p] = fb;
            continue;
        }
        by_anchor[uu ? *ui : *ii].push_back(p);
    }

    SimilarityView view(train, uu ? SimilarityKind::UserPearson : SimilarityKind::ItemCosine, options_for(cfg));
    std::vector<Candidate> cands;
    for (const auto& [anchor, pairs] : by_anchor) {
        const auto row = view.row(anchor);
        for (const auto p : pairs) {
            const auto ui = *train.user_index(test[p].user);
            const auto ii = *train.item_index(test[p].item);
            if (uu) {
                uu_candidates(train, ui, ii, row, cfg.positive_only, cands);
            } else {
                ii_candidates(train, ui, ii, row, cfg.positive_only, cands);
            }
            const double offset = uu ? train.user_mean(ui) : 0.0;
            Accumulator acc;
            for (auto x : order) {
                acc.take(cands, ks[x]);
                out[x][p] = finish(acc, offset, train, test[p], cfg);
            }
        }
    }
    return out;
}

}  // namespace kidrec
