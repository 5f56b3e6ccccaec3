#include "kidrec/dataset_ops.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "kidrec/rng.hpp"

namespace kidrec {

namespace {

Dataset with_ratings(const Dataset& like, std::vector<Rating> ratings) {
    return Dataset::from_ratings(std::move(ratings), like.catalog());
}

std::vector<std::size_t> shuffled_positions(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    shuffle(std::span<std::size_t>(order), rng);
    return order;
}

}  // namespace

Dataset filter_min_ratings(const Dataset& ds, std::size_t min_ratings) {
    if (min_ratings < 1) throw DatasetError("min_ratings must be >= 1");
    std::vector<Rating> kept;
    const auto all = ds.ratings();
    // Ratings are grouped by user in canonical order.
    std::size_t start = 0;
    while (start < all.size()) {
        std::size_t end = start;
        while (end < all.size() && all[end].user == all[start].user) ++end;
        if (end - start >= min_ratings) kept.insert(kept.end(), all.begin() + start, all.begin() + end);
        start = end;
    }
    return with_ratings(ds, std::move(kept));
}

Split split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw DatasetError("train_fraction must lie in (0, 1)");
    const auto all = ds.ratings();
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(all.size()) + 0.5));
    const auto order = shuffled_positions(all.size(), seed);
    std::vector<char> in_train(all.size(), 0);
    for (std::size_t k = 0; k < n_train; ++k) in_train[order[k]] = 1;

    std::vector<Rating> train;
    std::vector<Rating> test;
    train.reserve(n_train);
    test.reserve(all.size() - n_train);
    for (std::size_t k = 0; k < all.size(); ++k) (in_train[k] ? train : test).push_back(all[k]);
    return {with_ratings(ds, std::move(train)), with_ratings(ds, std::move(test))};
}

std::vector<Split> k_fold(const Dataset& ds, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw DatasetError("k_fold needs at least 2 folds");
    const auto all = ds.ratings();
    const auto order = shuffled_positions(all.size(), seed);
    std::vector<std::size_t> fold_of(all.size());
    for (std::size_t k = 0; k < order.size(); ++k) fold_of[order[k]] = k % folds;

    std::vector<Split> out;
    out.reserve(folds);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<Rating> train;
        std::vector<Rating> test;
        for (std::size_t k = 0; k < all.size(); ++k) (fold_of[k] == f ? test : train).push_back(all[k]);
        out.push_back({with_ratings(ds, std::move(train)), with_ratings(ds, std::move(test))});
    }
    return out;
}

std::string normalize_title(std::string_view title) {
    std::string lowered;
    for (unsigned char c : title) {
        if (std::isalnum(c) || c >= 0x80) {
            lowered += static_cast<char>(std::tolower(c));
        } else if (c == '\'') {
            // "Children's" -> "childrens"
        } else {
            lowered += ' ';
        }
    }
    std::vector<std::string> words;
    std::size_t k = 0;
    while (k < lowered.size()) {
        while (k < lowered.size() && lowered[k] == ' ') ++k;
        std::size_t end = k;
        while (end < lowered.size() && lowered[end] != ' ') ++end;
        if (end > k) words.emplace_back(lowered.substr(k, end - k));
        k = end;
    }
    const auto is_article = [](const std::string& w) { return w == "the" || w == "a" || w == "an"; };
    if (words.size() > 1 && is_article(words.front())) {
        std::rotate(words.begin(), words.begin() + 1, words.end());
    }
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

MergeResult merge(const Dataset& a, const Dataset& b, ItemMatching matching) {
    std::unordered_map<ItemRef, ItemMeta> catalog = a.catalog();
    std::unordered_map<ItemRef, ItemRef> remap;

    if (matching == ItemMatching::ByTitleYear) {
        struct Candidate {
            ItemRef ref;
            std::optional<int> year;
        };
        std::unordered_map<std::string, std::vector<Candidate>> by_title;
        for (const auto& [ref, meta] : a.catalog()) {
            if (meta.title.empty()) continue;
            by_title[normalize_title(meta.title)].push_back({ref, meta.year});
        }
        for (auto& [key, cands] : by_title) {
            std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) { return x.ref < y.ref; });
        }
        for (const auto& [ref, meta] : b.catalog()) {
            if (meta.title.empty()) continue;
            const auto it = by_title.find(normalize_title(meta.title));
            if (it == by_title.end()) continue;
            for (const auto& c : it->second) {
                if (c.year && meta.year && *c.year != *meta.year) continue;
                if (c.ref != ref) remap.emplace(ref, c.ref);
                // A unified item is a children's item if either side says so.
                auto& target = catalog.at(c.ref);
                target.genres.insert(meta.genres.begin(), meta.genres.end());
                break;
            }
        }
    }
    for (const auto& [ref, meta] : b.catalog()) {
        if (!remap.contains(ref)) catalog.emplace(ref, meta);
    }

    DatasetBuilder builder;
    for (const auto& r : a.ratings()) builder.add(r);
    std::size_t collisions = 0;
    for (Rating r : b.ratings()) {
        if (const auto it = remap.find(r.item); it != remap.end()) r.item = it->second;
        if (!builder.try_add(r)) ++collisions;
    }
    for (auto& [ref, meta] : catalog) builder.add_meta(std::move(meta));
    return {std::move(builder).build(), collisions, remap.size()};
}

std::set<UserRef> select_kplus_users(const Dataset& ds, std::size_t min_children) {
    std::set<UserRef> out;
    for (std::uint32_t u = 0; u < ds.user_count(); ++u) {
        std::size_t n = 0;
        for (const auto& e : ds.user_ratings(u)) n += ds.is_children(e.index) ? 1 : 0;
        if (n >= min_children) out.insert(ds.users()[u]);
    }
    return out;
}

Dataset restrict_to_users(const Dataset& ds, const std::set<UserRef>& users, RestrictMode mode) {
    std::vector<Rating> kept;
    for (const auto& r : ds.ratings()) {
        if (!users.contains(r.user)) continue;
        if (mode == RestrictMode::ChildrenOnly) {
            const auto i = ds.item_index(r.item);
            if (!ds.is_children(*i)) continue;
        }
        kept.push_back(r);
    }
    return with_ratings(ds, std::move(kept));
}

Dataset subsample(const Dataset& ds, std::size_t n, std::uint64_t seed) {
    const auto all = ds.ratings();
    if (n >= all.size()) return ds;
    auto order = shuffled_positions(all.size(), seed);
    order.resize(n);
    std::sort(order.begin(), order.end());
    std::vector<Rating> kept;
    kept.reserve(n);
    for (auto k : order) kept.push_back(all[k]);
    return with_ratings(ds, std::move(kept));
}

}  // namespace kidrec
