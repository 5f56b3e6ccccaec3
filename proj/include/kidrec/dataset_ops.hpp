#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kidrec/dataset.hpp"

namespace kidrec {

/// Keeps exactly the users with at least `min_ratings` ratings (single pass;
/// items left without ratings disappear from the index).
Dataset filter_min_ratings(const Dataset& ds, std::size_t min_ratings);

struct Split {
    Dataset train;
    Dataset test;
};

/// Global uniform partition of ratings; |train| = floor(fraction * n + 0.5).
Split split(const Dataset& ds, double train_fraction, std::uint64_t seed);

/// k-fold partition over ratings. Fold f's test set holds the ratings whose
/// position in a seeded shuffle is congruent to f mod k.
std::vector<Split> k_fold(const Dataset& ds, std::size_t folds, std::uint64_t seed);

enum class ItemMatching { ByTitleYear, None };

struct MergeResult {
    Dataset dataset;
    /// (user, item) pairs dropped because item unification made them collide
    /// with a pair already present; the first occurrence is kept.
    std::size_t collisions = 0;
    /// Items of `b` mapped onto an item of `a`.
    std::size_t unified_items = 0;
};

/// Union of ratings. Ratings from `a` take precedence on collisions.
MergeResult merge(const Dataset& a, const Dataset& b, ItemMatching matching = ItemMatching::ByTitleYear);

/// Lowercase, punctuation stripped, leading article moved to the end
/// ("The Lion King" and "Lion King, The" both become "lion king the").
std::string normalize_title(std::string_view title);

/// Users with at least `min_children` ratings on children's items.
std::set<UserRef> select_kplus_users(const Dataset& ds, std::size_t min_children);

enum class RestrictMode { ChildrenOnly, AllRatings };

Dataset restrict_to_users(const Dataset& ds, const std::set<UserRef>& users,
                          RestrictMode mode = RestrictMode::ChildrenOnly);

/// Seeded subsample of `n` ratings (all of them when n >= size), kept in
/// canonical order.
Dataset subsample(const Dataset& ds, std::size_t n, std::uint64_t seed);

}  // namespace kidrec
