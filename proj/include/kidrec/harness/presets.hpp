#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kidrec/harness/spec.hpp"

namespace kidrec::harness {

/// Bundled experiment families. Synthetic presets need no input files;
/// ml1m-* presets read ml-1m/ratings.dat and ml-1m/movies.dat from the
/// data directory.
///
///   child-baseline     child_x for x in {2, 10, 20}, 5-fold cross-validation
///   child-holdout      child_x_Tr::child_x_Te, child-only training
///   merge-full         adult_20 & child_x_Tr::child_x_Te
///   merge-kplus        K+ users (children's ratings only) & child_x_Tr::child_x_Te
///   merge-kplus-all    K+ users (all their ratings) & child_x_Tr::child_x_Te
///   synthetic-all      all of the above
///   ml1m-baseline      ML1M, 5-fold cross-validation
///   ml1m-merge-full, ml1m-merge-kplus, ml1m-merge-kplus-all
std::vector<std::string> preset_names();

/// Names of presets that run without external data.
std::vector<std::string> synthetic_preset_names();

/// Throws ConfigError for unknown names.
std::vector<ExperimentSpec> preset(std::string_view name, std::uint64_t seed = 1);

/// Child minimum-rating thresholds used by the bundled presets.
std::vector<std::size_t> preset_child_thresholds();

}  // namespace kidrec::harness
