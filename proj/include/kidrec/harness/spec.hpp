#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kidrec/predictor.hpp"

namespace kidrec::harness {

using Json = nlohmann::ordered_json;

/// Invalid experiment description; raised before any computation.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One named dataset-producing step of a recipe. `args` holds the
/// op-specific fields (everything but "name" and "op").
///
/// ops: load_ml1m, load, generate, filter, split, merge, kplus, subsample.
/// A split step named S produces S.train and S.test.
struct DatasetStep {
    std::string name;
    std::string op;
    Json args;

    /// Names of the datasets this step reads.
    std::vector<std::string> inputs() const;
    /// Names this step defines.
    std::vector<std::string> outputs() const;
};

enum class Protocol { Holdout, CrossValidation };

struct EvaluationSpec {
    Protocol protocol = Protocol::Holdout;
    std::string train;    // holdout
    std::string test;     // holdout
    std::string dataset;  // cross-validation
    std::size_t folds = 5;
    /// Upper bound on UU/II test pairs per evaluation set (0 = all), drawn
    /// with a seeded subsample.
    std::size_t knn_test_sample = 0;
};

struct AlgorithmSweep {
    Algorithm kind = Algorithm::MF;
    /// Neighborhood sizes (UU, II) or latent factor counts (MF).
    std::vector<std::size_t> values;
    /// Everything except the swept value; seed is derived from the spec seed.
    PredictorConfig base;
};

std::vector<std::size_t> default_neighborhood_sizes();
std::vector<std::size_t> default_latent_factors();

struct ExperimentSpec {
    std::string name;
    std::uint64_t seed = 1;
    /// Free-text "Min # of ratings" cell, e.g. "20::10".
    std::string min_ratings_label;
    std::vector<DatasetStep> datasets;
    EvaluationSpec evaluation;
    std::vector<AlgorithmSweep> algorithms;

    /// Throws ConfigError on unknown ops, references to undeclared or later
    /// datasets, duplicate names, or empty sweeps.
    void validate() const;

    static ExperimentSpec from_json(const Json& j);
    Json to_json() const;
};

/// Accepts a single spec object, an array of specs, or {"experiments": [...]}.
std::vector<ExperimentSpec> parse_specs(const Json& j);
std::vector<ExperimentSpec> load_spec_file(const std::filesystem::path& path);

}  // namespace kidrec::harness
