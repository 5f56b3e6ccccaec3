#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kidrec/dataset.hpp"
#include "kidrec/harness/spec.hpp"

namespace kidrec::harness {

struct RunContext {
    /// Root for relative data paths in specs. Defaults to $KIDREC_DATA_DIR,
    /// else the working directory.
    std::filesystem::path data_dir;
    /// Progress lines go here when set (never into reports).
    std::ostream* log = nullptr;

    static RunContext from_environment();
};

/// Every dataset a recipe defines, in definition order.
struct Materialized {
    std::vector<std::string> order;
    std::map<std::string, Dataset> datasets;
    std::vector<std::string> notes;

    const Dataset& at(const std::string& name) const;
};

/// Executes the recipe. Throws ConfigError for invalid specs (before any
/// work) and std::runtime_error naming the step when a step fails.
Materialized materialize(const ExperimentSpec& spec, const RunContext& ctx);

/// Seed used by a named step or evaluation stage of a spec.
std::uint64_t stage_seed(const ExperimentSpec& spec, std::string_view stage);

struct SweepPoint {
    std::size_t param = 0;
    /// Holdout: RMSE of the test set. Cross-validation: mean of fold RMSEs.
    double rmse = 0.0;
    std::vector<double> fold_rmse;
    double served_rmse = 0.0;
    double served_user_fraction = 0.0;
    double served_pair_fraction = 0.0;
    std::size_t n = 0;
};

struct AlgorithmResult {
    Algorithm kind = Algorithm::MF;
    std::vector<SweepPoint> points;
    std::size_t best = 0;
    /// FNV-1a over the evaluated (user, item, value) sequence.
    std::string test_fingerprint;
    /// Squared errors of the best point, aligned with the test sequence.
    std::vector<double> best_sq_errors;

    const SweepPoint& best_point() const { return points.at(best); }
};

struct ExperimentResult {
    std::string name;
    std::uint64_t seed = 0;
    std::string protocol;
    std::string min_ratings_label;
    DatasetStats train_stats;
    std::optional<DatasetStats> test_stats;
    std::vector<AlgorithmResult> algorithms;
    std::vector<std::string> notes;

    const AlgorithmResult* find(Algorithm kind) const;

    Json to_json() const;
    static ExperimentResult from_json(const Json& j);
};

ExperimentResult run(const ExperimentSpec& spec, const RunContext& ctx);

/// Same, reusing already materialized datasets.
ExperimentResult run(const ExperimentSpec& spec, const Materialized& data, const RunContext& ctx);

std::string fingerprint(std::span<const Rating> test);

}  // namespace kidrec::harness
