#include "kidrec/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace kidrec {

void validate_rating_value(double value) {
    if (!(value >= kMinRating && value <= kMaxRating)) {
        throw DatasetError("rating value " + std::to_string(value) + " outside [1, 5]");
    }
}

std::optional<std::uint32_t> Dataset::user_index(const UserRef& u) const {
    const auto it = user_lookup_.find(u);
    if (it == user_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> Dataset::item_index(const ItemRef& i) const {
    const auto it = item_lookup_.find(i);
    if (it == item_lookup_.end()) return std::nullopt;
    return it->second;
}

Dataset Dataset::from_ratings(std::vector<Rating> ratings, std::unordered_map<ItemRef, ItemMeta> catalog) {
    Dataset ds;
    ds.ratings_ = std::move(ratings);
    ds.catalog_ = std::move(catalog);
    std::sort(ds.ratings_.begin(), ds.ratings_.end(), [](const Rating& a, const Rating& b) {
        if (a.user != b.user) return a.user < b.user;
        return a.item < b.item;
    });
    for (std::size_t k = 0; k < ds.ratings_.size(); ++k) {
        validate_rating_value(ds.ratings_[k].value);
        if (k > 0 && ds.ratings_[k].user == ds.ratings_[k - 1].user && ds.ratings_[k].item == ds.ratings_[k - 1].item) {
            throw DatasetError("duplicate rating for (" + to_string(ds.ratings_[k].user) + ", " +
                               to_string(ds.ratings_[k].item) + ")");
        }
    }
    ds.index();
    return ds;
}

void Dataset::index() {
    users_.clear();
    items_.clear();
    for (const auto& r : ratings_) {
        if (users_.empty() || users_.back() != r.user) users_.push_back(r.user);
        items_.push_back(r.item);
    }
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());

    user_lookup_.clear();
    user_lookup_.reserve(users_.size());
    for (std::uint32_t u = 0; u < users_.size(); ++u) user_lookup_.emplace(users_[u], u);
    item_lookup_.clear();
    item_lookup_.reserve(items_.size());
    for (std::uint32_t i = 0; i < items_.size(); ++i) item_lookup_.emplace(items_[i], i);

    metas_.assign(items_.size(), ItemMeta{});
    for (std::uint32_t i = 0; i < items_.size(); ++i) {
        const auto it = catalog_.find(items_[i]);
        if (it != catalog_.end()) {
            metas_[i] = it->second;
        } else {
            metas_[i].item = items_[i];
        }
    }

    const std::size_t nu = users_.size();
    const std::size_t ni = items_.size();
    user_offsets_.assign(nu + 1, 0);
    item_offsets_.assign(ni + 1, 0);
    std::vector<std::uint32_t> rating_item(ratings_.size());
    std::vector<std::uint32_t> rating_user(ratings_.size());
    for (std::size_t k = 0; k < ratings_.size(); ++k) {
        rating_user[k] = user_lookup_.at(ratings_[k].user);
        rating_item[k] = item_lookup_.at(ratings_[k].item);
        ++user_offsets_[rating_user[k] + 1];
        ++item_offsets_[rating_item[k] + 1];
    }
    for (std::size_t u = 0; u < nu; ++u) user_offsets_[u + 1] += user_offsets_[u];
    for (std::size_t i = 0; i < ni; ++i) item_offsets_[i + 1] += item_offsets_[i];

    // Ratings are sorted by (user, item) and refs map monotonically onto
    // indices, so both fills below produce sorted lists.
    user_entries_.resize(ratings_.size());
    item_entries_.resize(ratings_.size());
    std::vector<std::size_t> item_fill(item_offsets_.begin(), item_offsets_.end() - 1);
    for (std::size_t k = 0; k < ratings_.size(); ++k) {
        user_entries_[k] = {rating_item[k], ratings_[k].value};
        item_entries_[item_fill[rating_item[k]]++] = {rating_user[k], ratings_[k].value};
    }

    user_means_.assign(nu, 0.0);
    item_means_.assign(ni, 0.0);
    double total = 0.0;
    for (std::uint32_t u = 0; u < nu; ++u) {
        double s = 0.0;
        for (const auto& e : user_ratings(u)) s += e.value;
        user_means_[u] = s / static_cast<double>(user_ratings(u).size());
    }
    for (std::uint32_t i = 0; i < ni; ++i) {
        double s = 0.0;
        for (const auto& e : item_ratings(i)) s += e.value;
        item_means_[i] = s / static_cast<double>(item_ratings(i).size());
    }
    half_star_ = true;
    for (const auto& r : ratings_) {
        total += r.value;
        half_star_ = half_star_ && 2.0 * r.value == std::floor(2.0 * r.value);
    }
    global_mean_ = ratings_.empty() ? 0.0 : total / static_cast<double>(ratings_.size());
}

std::size_t DatasetBuilder::PairHash::operator()(const PairKey& k) const noexcept {
    const std::uint64_t a = (std::uint64_t(k.user.ns) << 32) | k.user.id;
    const std::uint64_t b = (std::uint64_t(k.item.ns) << 32) | k.item.id;
    return std::hash<std::uint64_t>{}(a * 0x9E3779B97F4A7C15ULL ^ (b + 0x632BE59BD9B4E019ULL + (a << 6) + (a >> 2)));
}

bool DatasetBuilder::contains(const UserRef& u, const ItemRef& i) const { return seen_.contains({u, i}); }

void DatasetBuilder::add(const Rating& r) {
    validate_rating_value(r.value);
    if (!seen_.insert({r.user, r.item}).second) {
        throw DatasetError("duplicate rating for (" + to_string(r.user) + ", " + to_string(r.item) + ")");
    }
    ratings_.push_back(r);
}

bool DatasetBuilder::try_add(const Rating& r) {
    validate_rating_value(r.value);
    if (!seen_.insert({r.user, r.item}).second) return false;
    ratings_.push_back(r);
    return true;
}

void DatasetBuilder::add_meta(ItemMeta meta) {
    const ItemRef ref = meta.item;
    catalog_.insert_or_assign(ref, std::move(meta));
}

Dataset DatasetBuilder::build() && {
    seen_.clear();
    return Dataset::from_ratings(std::move(ratings_), std::move(catalog_));
}

}  // namespace kidrec
