#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "kidrec/dataset.hpp"

namespace kidrec {

/// Unknown user or item handed to a similarity query. Distinct from an
/// undefined similarity, which is reported as an empty optional.
class UnknownEntityError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

enum class SimilarityKind { ItemCosine, UserPearson };

struct SimilarityOptions {
    std::size_t min_overlap = 1;
    /// Cosine only: norms over each item's full rating vector instead of the
    /// co-rated support.
    bool full_norms = false;

    static SimilarityOptions cosine_defaults() { return {1, false}; }
    static SimilarityOptions pearson_defaults() { return {2, false}; }
};

/// Cosine of two items over co-rating users:
///   sum r_ui r_uj / (sqrt(sum r_ui^2) sqrt(sum r_uj^2))
/// Undefined below `min_overlap` co-raters or when a norm is zero.
std::optional<double> cosine_item(const Dataset& ds, const ItemRef& i, const ItemRef& j, std::size_t min_overlap = 1,
                                  bool full_norms = false);

/// Pearson correlation over co-rated items, each user centered on their mean
/// over the co-rated subset.
std::optional<double> pearson_user(const Dataset& ds, const UserRef& u, const UserRef& v, std::size_t min_overlap = 2);

/// Similarities addressed by dense index; value-identical to the ref-based
/// functions and to the rows produced by SimilarityView.
std::optional<double> cosine_items_at(const Dataset& ds, std::uint32_t i, std::uint32_t j, const SimilarityOptions& opts);
std::optional<double> pearson_users_at(const Dataset& ds, std::uint32_t u, std::uint32_t v, const SimilarityOptions& opts);

/// Lazy similarity matrix over one dataset. `row` fills the similarity of an
/// anchor to every entity of its kind in one sweep (NaN where undefined).
class SimilarityView {
public:
    SimilarityView(const Dataset& ds, SimilarityKind kind, SimilarityOptions opts);

    SimilarityKind kind() const { return kind_; }
    const SimilarityOptions& options() const { return opts_; }
    std::size_t size() const;

    std::optional<double> sim(std::uint32_t a, std::uint32_t b) const;

    /// Reuses internal scratch buffers; not safe to call concurrently on one
    /// view. Use one view per worker.
    std::span<const double> row(std::uint32_t anchor);

private:
    const Dataset* ds_;
    SimilarityKind kind_;
    SimilarityOptions opts_;
    std::vector<double> item_norms_;
    std::vector<double> sxy_, sx_, sy_, sxx_, syy_, count_, out_;
};

struct Neighbor {
    std::uint32_t index;
    double sim;

    bool operator==(const Neighbor&) const = default;
};

/// Ranking key of a similarity: values within 2^-40 of each other share a
/// key, so rounding noise of a few ulps never reorders equal similarities.
inline std::int64_t rank_key(double sim) { return std::llround(sim * 0x1p40); }

/// Strict neighbor order: rank key descending, then index ascending.
inline bool neighbor_before(const Neighbor& a, const Neighbor& b) {
    const auto ka = rank_key(a.sim), kb = rank_key(b.sim);
    return ka > kb || (ka == kb && a.index < b.index);
}

/// The `k` candidates most similar to `anchor` given its similarity row,
/// excluding the anchor and undefined entries (and non-positive ones when
/// `positive_only`).
std::vector<Neighbor> top_k_neighbors(std::span<const double> row, std::uint32_t anchor, std::size_t k,
                                      std::span<const std::uint32_t> candidates, bool positive_only = false);

/// Convenience over a view; candidates default to every entity.
std::vector<Neighbor> top_k_neighbors(SimilarityView& view, std::uint32_t anchor, std::size_t k,
                                      std::span<const std::uint32_t> candidates, bool positive_only = false);

}  // namespace kidrec
