#include "kidrec/harness/presets.hpp"

namespace kidrec::harness {

namespace {

constexpr std::size_t kAdultMinRatings = 20;
constexpr double kTrainFraction = 0.6;
// Bounds the UU/II cost on the ML1M folds; MF always sees every pair.
constexpr std::size_t kMl1mKnnSample = 100000;

enum class Adult { Synthetic, Ml1m };
enum class Family { ChildOnly, Full, KPlus, KPlusAll };

Json adult_source(Adult adult) {
    if (adult == Adult::Ml1m) {
        return {{"name", "adult"}, {"op", "load_ml1m"}, {"ratings", "ml-1m/ratings.dat"}, {"movies", "ml-1m/movies.dat"}};
    }
    return {{"name", "adult"}, {"op", "generate"}, {"profile", "adult"}};
}

Json algorithms() {
    return {{"UU", Json::object()}, {"II", Json::object()}, {"MF", Json::object()}};
}

// Child data always draws its catalog from the adult source so title/year
// matching can unify the shared children's items.
Json child_steps(Adult adult, std::size_t x) {
    Json steps = Json::array();
    steps.push_back(adult_source(adult));
    steps.push_back({{"name", "child"}, {"op", "generate"}, {"profile", "child"}, {"catalog_from", "adult"}});
    steps.push_back({{"name", "child_" + std::to_string(x)}, {"op", "filter"}, {"input", "child"}, {"min_ratings", x}});
    return steps;
}

ExperimentSpec holdout_spec(Adult adult, Family family, std::size_t x, std::uint64_t seed) {
    const std::string cx = "child_" + std::to_string(x);
    const std::string adult_name = adult == Adult::Ml1m ? "ML1M" : "adult";
    Json steps = child_steps(adult, x);
    steps.push_back({{"name", cx + "_split"}, {"op", "split"}, {"input", cx}, {"train_fraction", kTrainFraction}});
    const std::string train = cx + "_split.train";
    const std::string test = cx + "_split.test";
    const std::string tail = cx + "_Tr::" + cx + "_Te";

    std::string name;
    std::string label;
    std::string train_name = train;
    if (family == Family::ChildOnly) {
        name = tail;
        label = std::to_string(x) + "::" + std::to_string(x);
    } else {
        steps.push_back({{"name", "adult_20"}, {"op", "filter"}, {"input", "adult"}, {"min_ratings", kAdultMinRatings}});
        std::string aux = "adult_20";
        if (family == Family::Full) {
            name = adult_name + " & " + tail;
            label = std::to_string(kAdultMinRatings) + "::" + std::to_string(x);
        } else {
            const bool all = family == Family::KPlusAll;
            aux = all ? "kplus_all" : "kplus";
            steps.push_back({{"name", aux},
                             {"op", "kplus"},
                             {"input", "adult_20"},
                             {"min_children", 2},
                             {"mode", all ? "all_ratings" : "children_only"}});
            name = adult_name + (all ? "_K+all & " : "_K+ & ") + tail;
            label = std::to_string(kAdultMinRatings) + " & " + std::to_string(x) + "::" + std::to_string(x);
        }
        // child first: unified items keep the child refs used by the test set
        steps.push_back({{"name", "merged"}, {"op", "merge"}, {"inputs", {train, aux}}, {"item_matching", "by_title_year"}});
        train_name = "merged";
    }
    Json evaluation = {{"protocol", "holdout"}, {"train", train_name}, {"test", test}};
    if (adult == Adult::Ml1m) evaluation["knn_test_sample"] = kMl1mKnnSample;
    const Json j = {{"name", name},         {"seed", seed},          {"min_ratings_label", label},
                    {"datasets", steps},    {"evaluation", evaluation}, {"algorithms", algorithms()}};
    return ExperimentSpec::from_json(j);
}

ExperimentSpec child_cv_spec(std::size_t x, std::uint64_t seed) {
    const std::string cx = "child_" + std::to_string(x);
    const Json j = {{"name", cx},
                    {"seed", seed},
                    {"min_ratings_label", std::to_string(x)},
                    {"datasets", child_steps(Adult::Synthetic, x)},
                    {"evaluation", {{"protocol", "cross_validation"}, {"dataset", cx}, {"folds", 5}}},
                    {"algorithms", algorithms()}};
    return ExperimentSpec::from_json(j);
}

ExperimentSpec ml1m_cv_spec(std::uint64_t seed) {
    const Json j = {{"name", "ML1M"},
                    {"seed", seed},
                    {"min_ratings_label", std::to_string(kAdultMinRatings)},
                    {"datasets", Json::array({adult_source(Adult::Ml1m)})},
                    {"evaluation",
                     {{"protocol", "cross_validation"}, {"dataset", "adult"}, {"folds", 5}, {"knn_test_sample", kMl1mKnnSample / 5}}},
                    {"algorithms", algorithms()}};
    return ExperimentSpec::from_json(j);
}

std::vector<ExperimentSpec> family(Adult adult, Family f, std::uint64_t seed) {
    std::vector<ExperimentSpec> out;
    for (auto x : preset_child_thresholds()) out.push_back(holdout_spec(adult, f, x, seed));
    return out;
}

}  // namespace

std::vector<std::size_t> preset_child_thresholds() { return {2, 10, 20}; }

std::vector<std::string> synthetic_preset_names() {
    return {"child-baseline", "child-holdout", "merge-full", "merge-kplus", "merge-kplus-all", "synthetic-all"};
}

std::vector<std::string> preset_names() {
    auto names = synthetic_preset_names();
    for (const char* n : {"ml1m-baseline", "ml1m-merge-full", "ml1m-merge-kplus", "ml1m-merge-kplus-all"}) names.emplace_back(n);
    return names;
}

std::vector<ExperimentSpec> preset(std::string_view name, std::uint64_t seed) {
    if (name == "child-baseline") {
        std::vector<ExperimentSpec> out;
        for (auto x : preset_child_thresholds()) out.push_back(child_cv_spec(x, seed));
        return out;
    }
    if (name == "child-holdout") return family(Adult::Synthetic, Family::ChildOnly, seed);
    if (name == "merge-full") return family(Adult::Synthetic, Family::Full, seed);
    if (name == "merge-kplus") return family(Adult::Synthetic, Family::KPlus, seed);
    if (name == "merge-kplus-all") return family(Adult::Synthetic, Family::KPlusAll, seed);
    if (name == "synthetic-all") {
        std::vector<ExperimentSpec> out;
        for (const auto& n : synthetic_preset_names()) {
            if (n == "synthetic-all") continue;
            for (auto& s : preset(n, seed)) out.push_back(std::move(s));
        }
        return out;
    }
    if (name == "ml1m-baseline") return {ml1m_cv_spec(seed)};
    if (name == "ml1m-merge-full") return family(Adult::Ml1m, Family::Full, seed);
    if (name == "ml1m-merge-kplus") return family(Adult::Ml1m, Family::KPlus, seed);
    if (name == "ml1m-merge-kplus-all") return family(Adult::Ml1m, Family::KPlusAll, seed);
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace kidrec::harness
