#include "kidrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kidrec/rng.hpp"

namespace kidrec {

void SynthParams::validate() const {
    if (user_count == 0 || item_count == 0 || target_rating_count == 0) {
        throw DatasetError("synthetic counts must be positive");
    }
    if (target_rating_count > user_count * item_count) {
        throw DatasetError("target_rating_count exceeds user_count * item_count");
    }
    if (target_rating_count < user_count) {
        throw DatasetError("target_rating_count below user_count (every user rates at least one item)");
    }
    if (!(activity_exponent > 1.0)) throw DatasetError("activity_exponent must be > 1");
    if (!(item_popularity_exponent >= 0.0)) throw DatasetError("item_popularity_exponent must be >= 0");
    if (!(children_fraction >= 0.0 && children_fraction <= 1.0)) throw DatasetError("children_fraction must lie in [0, 1]");
    double sum = 0.0;
    for (double p : value_distribution) {
        if (!(p >= 0.0)) throw DatasetError("value_distribution entries must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DatasetError("value_distribution must sum to 1");
}

SynthParams adult_defaults() {
    SynthParams p;
    p.user_count = 2000;
    p.item_count = 1500;
    p.target_rating_count = 150000;
    p.activity_exponent = 2.2;
    p.item_popularity_exponent = 0.9;
    p.value_distribution = {0.056, 0.108, 0.261, 0.349, 0.226};
    p.children_fraction = 0.07;
    p.source = Source::Adult;
    return p;
}

SynthParams child_defaults() { return SynthParams{}; }

std::vector<std::size_t> synthetic_user_counts(const SynthParams& params) {
    params.validate();
    Rng rng(derive_seed(params.seed, 1));
    const double shape = 1.0 / (params.activity_exponent - 1.0);
    std::vector<double> raw(params.user_count);
    for (auto& x : raw) x = std::pow(uniform_open01(rng), -shape);

    const auto cap = params.item_count;
    const auto counts_at = [&](double scale, std::vector<std::size_t>* out) {
        std::size_t total = 0;
        for (std::size_t u = 0; u < raw.size(); ++u) {
            const double v = std::floor(scale * raw[u] + 0.5);
            const std::size_t n = v < 1.0 ? 1 : (v > static_cast<double>(cap) ? cap : static_cast<std::size_t>(v));
            if (out) (*out)[u] = n;
            total += n;
        }
        return total;
    };

    // Smallest scale whose total reaches the target.
    double lo = 0.0;
    double hi = 1.0;
    while (counts_at(hi, nullptr) < params.target_rating_count) hi *= 2.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (counts_at(mid, nullptr) >= params.target_rating_count ? hi : lo) = mid;
    }
    std::vector<std::size_t> counts(raw.size());
    std::size_t total = counts_at(hi, &counts);

    // Trim the rounding overshoot one rating at a time from random users.
    std::vector<std::size_t> order(counts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(std::span<std::size_t>(order), rng);
    std::size_t cursor = 0;
    while (total > params.target_rating_count) {
        auto& n = counts[order[cursor % order.size()]];
        if (n > 1) {
            --n;
            --total;
        }
        ++cursor;
    }
    return counts;
}

Dataset generate_synthetic(const SynthParams& params, const std::vector<ItemMeta>& catalog) {
    const auto counts = synthetic_user_counts(params);
    const std::size_t n_items = params.item_count;

    DatasetBuilder builder;
    for (std::size_t rank = 0; rank < n_items; ++rank) {
        ItemMeta meta;
        meta.item = {params.source, static_cast<std::uint32_t>(rank + 1)};
        if (rank < catalog.size()) {
            meta.title = catalog[rank].title;
            meta.year = catalog[rank].year;
            meta.genres = catalog[rank].genres;
        } else {
            const double cf = params.children_fraction;
            const bool children = std::floor(static_cast<double>(rank + 1) * cf) > std::floor(static_cast<double>(rank) * cf);
            meta.title = std::string(to_string(params.source)) + " title " + std::to_string(rank + 1);
            meta.year = 1960 + static_cast<int>(rank % 60);
            meta.genres = {children ? std::string(kChildrensGenre) : std::string("Drama")};
        }
        builder.add_meta(std::move(meta));
    }

    std::vector<double> weight(n_items);
    for (std::size_t rank = 0; rank < n_items; ++rank) {
        weight[rank] = std::pow(static_cast<double>(rank + 1), -params.item_popularity_exponent);
    }
    std::array<double, 5> cdf{};
    std::partial_sum(params.value_distribution.begin(), params.value_distribution.end(), cdf.begin());

    Rng item_rng(derive_seed(params.seed, 2));
    Rng value_rng(derive_seed(params.seed, 3));
    std::vector<std::pair<double, std::uint32_t>> keys(n_items);
    for (std::size_t u = 0; u < counts.size(); ++u) {
        const std::size_t n = counts[u];
        // Weighted sampling without replacement (Efraimidis-Spirakis keys).
        for (std::size_t rank = 0; rank < n_items; ++rank) {
            keys[rank] = {std::log(uniform_open01(item_rng)) / weight[rank], static_cast<std::uint32_t>(rank)};
        }
        const auto by_key = [](const auto& x, const auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); };
        if (n < n_items) std::nth_element(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n), keys.end(), by_key);
        std::sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n), [](const auto& x, const auto& y) { return x.second < y.second; });

        const UserRef user{params.source, static_cast<std::uint32_t>(u + 1)};
        for (std::size_t k = 0; k < n; ++k) {
            const double draw = uniform01(value_rng);
            int value = 5;
            for (int v = 0; v < 5; ++v) {
                if (draw < cdf[v]) {
                    value = v + 1;
                    break;
                }
            }
            builder.add({user, {params.source, keys[k].second + 1}, static_cast<double>(value), params.source});
        }
    }
    return std::move(builder).build();
}

std::vector<ItemMeta> children_catalog(const Dataset& ds) {
    std::vector<std::pair<std::size_t, ItemMeta>> found;
    for (const auto& [ref, meta] : ds.catalog()) {
        if (!meta.is_children()) continue;
        const auto idx = ds.item_index(ref);
        found.emplace_back(idx ? ds.item_ratings(*idx).size() : 0, meta);
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second.item < b.second.item;
    });
    std::vector<ItemMeta> out;
    out.reserve(found.size());
    for (auto& [n, meta] : found) out.push_back(std::move(meta));
    return out;
}

}  // namespace kidrec
