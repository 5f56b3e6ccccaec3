#include "kidrec/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kidrec/kernels.hpp"

namespace kidrec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double item_norm_sq(const Dataset& ds, std::uint32_t i) {
    double s = 0.0;
    for (const auto& e : ds.item_ratings(i)) s += e.value * e.value;
    return s;
}

std::optional<double> to_optional(double v) {
    if (std::isnan(v)) return std::nullopt;
    return v;
}

// Centered two-pass Pearson for values whose moment sums round. Same
// definedness rule and output form as the moment finalizer.
double pearson_two_pass(const Dataset& ds, std::uint32_t u, std::uint32_t v, double min_overlap) {
    const auto a = ds.user_ratings(u);
    const auto b = ds.user_ratings(v);
    std::vector<std::pair<double, double>> co;
    std::size_t x = 0, y = 0;
    while (x < a.size() && y < b.size()) {
        if (a[x].index < b[y].index) {
            ++x;
        } else if (b[y].index < a[x].index) {
            ++y;
        } else {
            co.emplace_back(a[x++].value, b[y++].value);
        }
    }
    const double c = static_cast<double>(co.size());
    if (!(c >= min_overlap && c > 0.0)) return kNaN;
    double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0;
    for (const auto& [p, q] : co) {
        mx += p;
        my += q;
        sxx += p * p;
        syy += q * q;
    }
    mx /= c;
    my /= c;
    double cxy = 0.0, cxx = 0.0, cyy = 0.0;
    for (const auto& [p, q] : co) {
        cxy += (p - mx) * (q - my);
        cxx += (p - mx) * (p - mx);
        cyy += (q - my) * (q - my);
    }
    if (!(cxx > simd::kZeroVarianceRel * sxx && cyy > simd::kZeroVarianceRel * syy)) return kNaN;
    const double r2 = std::min(cxy * cxy / (cxx * cyy), 1.0);
    return std::copysign(std::sqrt(r2), cxy);
}

}  // namespace

std::optional<double> cosine_items_at(const Dataset& ds, std::uint32_t i, std::uint32_t j, const SimilarityOptions& opts) {
    const auto a = ds.item_ratings(i);
    const auto b = ds.item_ratings(j);
    double sxy = 0.0, sxx = 0.0, syy = 0.0, count = 0.0;
    std::size_t x = 0, y = 0;
    while (x < a.size() && y < b.size()) {
        if (a[x].index < b[y].index) {
            ++x;
        } else if (b[y].index < a[x].index) {
            ++y;
        } else {
            sxy += a[x].value * b[y].value;
            sxx += a[x].value * a[x].value;
            syy += b[y].value * b[y].value;
            count += 1.0;
            ++x;
            ++y;
        }
    }
    if (opts.full_norms) {
        sxx = item_norm_sq(ds, i);
        syy = item_norm_sq(ds, j);
    }
    double out = 0.0;
    simd::active().cosine_finalize(&sxy, &sxx, &syy, &count, 1, static_cast<double>(opts.min_overlap), &out);
    return to_optional(out);
}

std::optional<double> pearson_users_at(const Dataset& ds, std::uint32_t u, std::uint32_t v, const SimilarityOptions& opts) {
    if (!ds.half_star_values()) return to_optional(pearson_two_pass(ds, u, v, static_cast<double>(opts.min_overlap)));
    const auto a = ds.user_ratings(u);
    const auto b = ds.user_ratings(v);
    double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, count = 0.0;
    std::size_t x = 0, y = 0;
    while (x < a.size() && y < b.size()) {
        if (a[x].index < b[y].index) {
            ++x;
        } else if (b[y].index < a[x].index) {
            ++y;
        } else {
            const double xv = a[x].value;
            const double yv = b[y].value;
            sx += xv;
            sy += yv;
            sxx += xv * xv;
            syy += yv * yv;
            sxy += xv * yv;
            count += 1.0;
            ++x;
            ++y;
        }
    }
    double out = 0.0;
    simd::active().pearson_finalize(&sxy, &sx, &sy, &sxx, &syy, &count, 1, static_cast<double>(opts.min_overlap), &out);
    return to_optional(out);
}

std::optional<double> cosine_item(const Dataset& ds, const ItemRef& i, const ItemRef& j, std::size_t min_overlap,
                                  bool full_norms) {
    const auto a = ds.item_index(i);
    const auto b = ds.item_index(j);
    if (!a) throw UnknownEntityError("unknown item " + to_string(i));
    if (!b) throw UnknownEntityError("unknown item " + to_string(j));
    return cosine_items_at(ds, *a, *b, {min_overlap, full_norms});
}

std::optional<double> pearson_user(const Dataset& ds, const UserRef& u, const UserRef& v, std::size_t min_overlap) {
    const auto a = ds.user_index(u);
    const auto b = ds.user_index(v);
    if (!a) throw UnknownEntityError("unknown user " + to_string(u));
    if (!b) throw UnknownEntityError("unknown user " + to_string(v));
    return pearson_users_at(ds, *a, *b, {min_overlap, false});
}

SimilarityView::SimilarityView(const Dataset& ds, SimilarityKind kind, SimilarityOptions opts)
    : ds_(&ds), kind_(kind), opts_(opts) {
    const std::size_t n = size();
    if (kind_ == SimilarityKind::ItemCosine && opts_.full_norms) {
        item_norms_.resize(n);
        for (std::uint32_t i = 0; i < n; ++i) item_norms_[i] = item_norm_sq(ds, i);
    }
    for (auto* buf : {&sxy_, &sx_, &sy_, &sxx_, &syy_, &count_, &out_}) buf->assign(n, 0.0);
}

std::size_t SimilarityView::size() const {
    return kind_ == SimilarityKind::ItemCosine ? ds_->item_count() : ds_->user_count();
}

std::optional<double> SimilarityView::sim(std::uint32_t a, std::uint32_t b) const {
    return kind_ == SimilarityKind::ItemCosine ? cosine_items_at(*ds_, a, b, opts_) : pearson_users_at(*ds_, a, b, opts_);
}

std::span<const double> SimilarityView::row(std::uint32_t anchor) {
    const std::size_t n = size();
    if (anchor >= n) throw UnknownEntityError("similarity anchor out of range");
    const auto& k = simd::active();
    if (kind_ == SimilarityKind::ItemCosine) {
        std::fill(sxy_.begin(), sxy_.end(), 0.0);
        std::fill(sxx_.begin(), sxx_.end(), 0.0);
        std::fill(syy_.begin(), syy_.end(), 0.0);
        std::fill(count_.begin(), count_.end(), 0.0);
        // Users ascend in the item list, so every (anchor, j) sum accumulates
        // in the same order as the pairwise merge.
        for (const auto& ue : ds_->item_ratings(anchor)) {
            const double x = ue.value;
            for (const auto& ie : ds_->user_ratings(ue.index)) {
                const double y = ie.value;
                sxy_[ie.index] += x * y;
                sxx_[ie.index] += x * x;
                syy_[ie.index] += y * y;
                count_[ie.index] += 1.0;
            }
        }
        if (opts_.full_norms) {
            std::fill(sxx_.begin(), sxx_.end(), item_norms_[anchor]);
            std::copy(item_norms_.begin(), item_norms_.end(), syy_.begin());
        }
        k.cosine_finalize(sxy_.data(), sxx_.data(), syy_.data(), count_.data(), n, static_cast<double>(opts_.min_overlap),
                          out_.data());
    } else {
        for (auto* buf : {&sxy_, &sx_, &sy_, &sxx_, &syy_, &count_}) std::fill(buf->begin(), buf->end(), 0.0);
        for (const auto& ie : ds_->user_ratings(anchor)) {
            const double x = ie.value;
            for (const auto& ue : ds_->item_ratings(ie.index)) {
                const double y = ue.value;
                const auto v = ue.index;
                sx_[v] += x;
                sy_[v] += y;
                sxx_[v] += x * x;
                syy_[v] += y * y;
                sxy_[v] += x * y;
                count_[v] += 1.0;
            }
        }
        k.pearson_finalize(sxy_.data(), sx_.data(), sy_.data(), sxx_.data(), syy_.data(), count_.data(), n,
                           static_cast<double>(opts_.min_overlap), out_.data());
        if (!ds_->half_star_values()) {
            for (std::uint32_t v = 0; v < n; ++v) {
                if (count_[v] > 0.0) out_[v] = pearson_two_pass(*ds_, anchor, v, static_cast<double>(opts_.min_overlap));
            }
        }
    }
    return out_;
}

std::vector<Neighbor> top_k_neighbors(std::span<const double> row, std::uint32_t anchor, std::size_t k,
                                      std::span<const std::uint32_t> candidates, bool positive_only) {
    std::vector<Neighbor> pool;
    pool.reserve(candidates.size());
    for (auto c : candidates) {
        if (c == anchor) continue;
        const double s = row[c];
        if (std::isnan(s)) continue;
        if (positive_only && !(s > 0.0)) continue;
        pool.push_back({c, s});
    }
    if (k < pool.size()) {
        std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end(), neighbor_before);
        pool.resize(k);
    } else {
        std::sort(pool.begin(), pool.end(), neighbor_before);
    }
    return pool;
}

std::vector<Neighbor> top_k_neighbors(SimilarityView& view, std::uint32_t anchor, std::size_t k,
                                      std::span<const std::uint32_t> candidates, bool positive_only) {
    const auto row = view.row(anchor);
    if (!candidates.empty()) return top_k_neighbors(row, anchor, k, candidates, positive_only);
    std::vector<std::uint32_t> all(view.size());
    for (std::uint32_t c = 0; c < all.size(); ++c) all[c] = c;
    return top_k_neighbors(row, anchor, k, all, positive_only);
}

}  // namespace kidrec
