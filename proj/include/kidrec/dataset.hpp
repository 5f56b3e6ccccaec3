#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kidrec/types.hpp"

namespace kidrec {

struct DatasetStats {
    std::size_t users = 0;
    std::size_t items = 0;
    std::size_t ratings = 0;

    bool operator==(const DatasetStats&) const = default;
};

/// One entry of a per-user (or per-item) rating list; `index` is the dense
/// index of the item (or user).
struct Entry {
    std::uint32_t index;
    double value;
};

/// Immutable, indexed rating collection.
///
/// Users and items are assigned dense indices in ascending ref order, so
/// index order is identifier order. Ratings are kept sorted by (user, item).
/// Per-user lists are sorted by item index and per-item lists by user index.
class Dataset {
public:
    Dataset() = default;

    DatasetStats stats() const { return {users_.size(), items_.size(), ratings_.size()}; }
    bool empty() const { return ratings_.empty(); }

    std::span<const Rating> ratings() const { return ratings_; }
    std::span<const UserRef> users() const { return users_; }
    std::span<const ItemRef> items() const { return items_; }

    std::size_t user_count() const { return users_.size(); }
    std::size_t item_count() const { return items_.size(); }

    std::optional<std::uint32_t> user_index(const UserRef& u) const;
    std::optional<std::uint32_t> item_index(const ItemRef& i) const;

    std::span<const Entry> user_ratings(std::uint32_t u) const {
        return {user_entries_.data() + user_offsets_[u], user_offsets_[u + 1] - user_offsets_[u]};
    }
    std::span<const Entry> item_ratings(std::uint32_t i) const {
        return {item_entries_.data() + item_offsets_[i], item_offsets_[i + 1] - item_offsets_[i]};
    }

    double user_mean(std::uint32_t u) const { return user_means_[u]; }
    double item_mean(std::uint32_t i) const { return item_means_[i]; }
    /// Mean of every rating; 0 for an empty dataset.
    double global_mean() const { return global_mean_; }
    /// Every value is a multiple of 0.5, so similarity moment sums are exact.
    bool half_star_values() const { return half_star_; }

    /// Metadata of an indexed item. Items without known metadata carry an
    /// ItemMeta with an empty title and no genres.
    const ItemMeta& meta(std::uint32_t i) const { return metas_[i]; }
    bool is_children(std::uint32_t i) const { return metas_[i].is_children(); }

    /// All metadata known to this dataset, including items that are not
    /// currently rated (ML1M lists movies nobody rated).
    const std::unordered_map<ItemRef, ItemMeta>& catalog() const { return catalog_; }

    /// Builds from ratings that must already satisfy the Rating invariants
    /// (range, unique pairs). Throws DatasetError otherwise.
    static Dataset from_ratings(std::vector<Rating> ratings,
                                std::unordered_map<ItemRef, ItemMeta> catalog = {});

private:
    void index();

    std::vector<Rating> ratings_;
    std::vector<UserRef> users_;
    std::vector<ItemRef> items_;
    std::vector<ItemMeta> metas_;
    std::unordered_map<ItemRef, ItemMeta> catalog_;
    std::unordered_map<UserRef, std::uint32_t> user_lookup_;
    std::unordered_map<ItemRef, std::uint32_t> item_lookup_;

    std::vector<std::size_t> user_offsets_;
    std::vector<Entry> user_entries_;
    std::vector<std::size_t> item_offsets_;
    std::vector<Entry> item_entries_;

    std::vector<double> user_means_;
    std::vector<double> item_means_;
    double global_mean_ = 0.0;
    bool half_star_ = true;
};

/// Incremental single-writer construction with invariant checks.
class DatasetBuilder {
public:
    /// Throws DatasetError on an out-of-range value or duplicate pair.
    void add(const Rating& r);
    /// Returns false (and does not insert) when the (user, item) pair exists.
    bool try_add(const Rating& r);
    void add_meta(ItemMeta meta);

    bool contains(const UserRef& u, const ItemRef& i) const;
    std::size_t size() const { return ratings_.size(); }

    Dataset build() &&;

private:
    struct PairKey {
        UserRef user;
        ItemRef item;
        bool operator==(const PairKey&) const = default;
    };
    struct PairHash {
        std::size_t operator()(const PairKey& k) const noexcept;
    };

    std::vector<Rating> ratings_;
    std::unordered_set<PairKey, PairHash> seen_;
    std::unordered_map<ItemRef, ItemMeta> catalog_;
};

void validate_rating_value(double value);

}  // namespace kidrec
