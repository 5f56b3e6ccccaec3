#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "kidrec/dataset.hpp"

namespace kidrec {

/// Parameters of the synthetic rating generator.
///
/// Ratings-per-user follow a continuous power law with density ~ x^-exponent
/// on [1, inf), rescaled so the total hits `target_rating_count` and
/// truncated to [1, item_count]. Items are chosen without replacement with
/// popularity weight (rank + 1)^-item_popularity_exponent. Values are i.i.d.
/// from `value_distribution` over {1, 2, 3, 4, 5}.
struct SynthParams {
    std::size_t user_count = 7000;
    std::size_t item_count = 2100;
    std::size_t target_rating_count = 30000;
    double activity_exponent = 2.4;
    double item_popularity_exponent = 0.8;
    std::array<double, 5> value_distribution{0.02, 0.03, 0.10, 0.35, 0.50};
    /// Fraction of items carrying the children's genre (evenly spread over
    /// the popularity ranking). 1.0 for a children-only catalog.
    double children_fraction = 1.0;
    Source source = Source::Child;
    std::uint64_t seed = 1;

    void validate() const;
};

/// ML1M-shaped adult defaults: wide value spread, heavier users, ~7%
/// children's titles.
SynthParams adult_defaults();

/// Children-site defaults: values concentrated on 4-5, a steep activity tail.
SynthParams child_defaults();

/// Generates a dataset. When `catalog` is non-empty its entries (in order)
/// supply the titles, years and genres of the most popular generated items,
/// which lets two generated or loaded datasets share titles for merging.
Dataset generate_synthetic(const SynthParams& params, const std::vector<ItemMeta>& catalog = {});

/// Children's items of a dataset's catalog in ascending ref order.
std::vector<ItemMeta> children_catalog(const Dataset& ds);

/// The per-user counts the generator would draw; exposed for tests.
std::vector<std::size_t> synthetic_user_counts(const SynthParams& params);

}  // namespace kidrec
