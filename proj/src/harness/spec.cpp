#include "kidrec/harness/spec.hpp"

#include <fstream>
#include <set>

namespace kidrec::harness {

namespace {

const std::set<std::string>& known_ops() {
    static const std::set<std::string> ops{"load_ml1m", "load", "generate", "filter", "split", "merge", "kplus", "subsample"};
    return ops;
}

std::string protocol_name(Protocol p) { return p == Protocol::Holdout ? "holdout" : "cross_validation"; }

}  // namespace

std::vector<std::size_t> default_neighborhood_sizes() { return {50, 80, 100, 120, 150, 200, 250}; }
std::vector<std::size_t> default_latent_factors() { return {40, 60, 80, 120}; }

std::vector<std::string> DatasetStep::inputs() const {
    std::vector<std::string> out;
    if (args.contains("input")) out.push_back(args.at("input").get<std::string>());
    if (args.contains("inputs")) {
        for (const auto& x : args.at("inputs")) out.push_back(x.get<std::string>());
    }
    if (args.contains("catalog_from")) out.push_back(args.at("catalog_from").get<std::string>());
    return out;
}

std::vector<std::string> DatasetStep::outputs() const {
    if (op == "split") return {name + ".train", name + ".test"};
    return {name};
}

void ExperimentSpec::validate() const {
    if (name.empty()) throw ConfigError("experiment needs a name");
    std::set<std::string> defined;
    for (const auto& step : datasets) {
        const std::string where = "experiment '" + name + "', step '" + step.name + "'";
        if (step.name.empty()) throw ConfigError("experiment '" + name + "': dataset step without a name");
        if (!known_ops().contains(step.op)) throw ConfigError(where + ": unknown op '" + step.op + "'");
        std::vector<std::string> ins;
        try {
            ins = step.inputs();
        } catch (const std::exception& e) {
            throw ConfigError(where + ": " + e.what());
        }
        for (const auto& in : ins) {
            if (!defined.contains(in)) throw ConfigError(where + ": references undeclared dataset '" + in + "'");
        }
        const bool needs_input = step.op == "filter" || step.op == "split" || step.op == "kplus" || step.op == "subsample";
        if (needs_input && !step.args.contains("input")) throw ConfigError(where + ": missing 'input'");
        if (step.op == "merge" && (!step.args.contains("inputs") || step.args.at("inputs").size() < 2)) {
            throw ConfigError(where + ": merge needs at least two 'inputs'");
        }
        if ((step.op == "load_ml1m" || step.op == "load") && !step.args.contains("ratings")) {
            throw ConfigError(where + ": missing 'ratings' path");
        }
        if (step.op == "load_ml1m" && !step.args.contains("movies")) throw ConfigError(where + ": missing 'movies' path");
        if (step.op == "filter" && !step.args.contains("min_ratings")) throw ConfigError(where + ": missing 'min_ratings'");
        for (const auto& out : step.outputs()) {
            if (!defined.insert(out).second) throw ConfigError(where + ": dataset '" + out + "' defined twice");
        }
    }
    const std::string where = "experiment '" + name + "'";
    if (evaluation.protocol == Protocol::Holdout) {
        if (!defined.contains(evaluation.train)) throw ConfigError(where + ": evaluation train '" + evaluation.train + "' undeclared");
        if (!defined.contains(evaluation.test)) throw ConfigError(where + ": evaluation test '" + evaluation.test + "' undeclared");
    } else {
        if (!defined.contains(evaluation.dataset)) {
            throw ConfigError(where + ": evaluation dataset '" + evaluation.dataset + "' undeclared");
        }
        if (evaluation.folds < 2) throw ConfigError(where + ": cross-validation needs at least 2 folds");
    }
    if (algorithms.empty()) throw ConfigError(where + ": no algorithms");
    for (const auto& a : algorithms) {
        if (a.values.empty()) throw ConfigError(where + ": empty sweep for " + std::string(to_string(a.kind)));
        for (auto v : a.values) {
            if (v < 1) throw ConfigError(where + ": sweep values must be >= 1");
        }
        try {
            a.base.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
}

ExperimentSpec ExperimentSpec::from_json(const Json& j) {
    try {
        ExperimentSpec s;
        s.name = j.at("name").get<std::string>();
        s.seed = j.value("seed", std::uint64_t{1});
        s.min_ratings_label = j.value("min_ratings_label", std::string());
        for (const auto& step : j.at("datasets")) {
            DatasetStep d;
            d.name = step.at("name").get<std::string>();
            d.op = step.at("op").get<std::string>();
            d.args = Json::object();
            for (const auto& [key, value] : step.items()) {
                if (key != "name" && key != "op") d.args[key] = value;
            }
            s.datasets.push_back(std::move(d));
        }

        const auto& ev = j.at("evaluation");
        const auto protocol = ev.at("protocol").get<std::string>();
        if (protocol == "holdout") {
            s.evaluation.protocol = Protocol::Holdout;
            s.evaluation.train = ev.at("train").get<std::string>();
            s.evaluation.test = ev.at("test").get<std::string>();
        } else if (protocol == "cross_validation") {
            s.evaluation.protocol = Protocol::CrossValidation;
            s.evaluation.dataset = ev.at("dataset").get<std::string>();
            s.evaluation.folds = ev.value("folds", std::size_t{5});
        } else {
            throw ConfigError("unknown protocol '" + protocol + "'");
        }
        s.evaluation.knn_test_sample = ev.value("knn_test_sample", std::size_t{0});

        PredictorConfig shared;
        if (j.contains("fallback")) {
            shared.fallback_chain.clear();
            for (const auto& stage : j.at("fallback")) shared.fallback_chain.push_back(parse_fallback_stage(stage.get<std::string>()));
        }
        shared.clamp = j.value("clamp", true);

        for (const auto& [key, a] : j.at("algorithms").items()) {
            AlgorithmSweep sweep;
            sweep.kind = parse_algorithm(key);
            sweep.base = shared;
            sweep.base.kind = sweep.kind;
            if (sweep.kind == Algorithm::MF) {
                sweep.values = a.value("factors", default_latent_factors());
                sweep.base.learning_rate = a.value("learning_rate", 0.07);
                sweep.base.regularization = a.value("regularization", 0.06);
                sweep.base.iterations = a.value("iterations", std::size_t{100});
                sweep.base.init_scale = a.value("init_scale", 0.1);
            } else {
                sweep.values = a.value("neighbors", default_neighborhood_sizes());
                sweep.base.min_overlap = a.value("min_overlap", std::size_t{0});
                sweep.base.positive_only = a.value("positive_only", false);
                sweep.base.full_norms = a.value("full_norms", false);
            }
            s.algorithms.push_back(std::move(sweep));
        }
        s.validate();
        return s;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid experiment spec: ") + e.what());
    }
}

Json ExperimentSpec::to_json() const {
    Json j;
    j["name"] = name;
    j["seed"] = seed;
    if (!min_ratings_label.empty()) j["min_ratings_label"] = min_ratings_label;
    j["datasets"] = Json::array();
    for (const auto& d : datasets) {
        Json step;
        step["name"] = d.name;
        step["op"] = d.op;
        for (const auto& [key, value] : d.args.items()) step[key] = value;
        j["datasets"].push_back(step);
    }
    Json ev;
    ev["protocol"] = protocol_name(evaluation.protocol);
    if (evaluation.protocol == Protocol::Holdout) {
        ev["train"] = evaluation.train;
        ev["test"] = evaluation.test;
    } else {
        ev["dataset"] = evaluation.dataset;
        ev["folds"] = evaluation.folds;
    }
    if (evaluation.knn_test_sample) ev["knn_test_sample"] = evaluation.knn_test_sample;
    j["evaluation"] = ev;
    if (!algorithms.empty()) {
        const auto& shared = algorithms.front().base;
        j["fallback"] = Json::array();
        for (auto s : shared.fallback_chain) j["fallback"].push_back(std::string(to_string(s)));
        j["clamp"] = shared.clamp;
    }
    Json algs = Json::object();
    for (const auto& a : algorithms) {
        Json x;
        if (a.kind == Algorithm::MF) {
            x["factors"] = a.values;
            x["learning_rate"] = a.base.learning_rate;
            x["regularization"] = a.base.regularization;
            x["iterations"] = a.base.iterations;
            x["init_scale"] = a.base.init_scale;
        } else {
            x["neighbors"] = a.values;
            if (a.base.min_overlap) x["min_overlap"] = a.base.min_overlap;
            x["positive_only"] = a.base.positive_only;
            if (a.kind == Algorithm::II) x["full_norms"] = a.base.full_norms;
        }
        algs[std::string(to_string(a.kind))] = x;
    }
    j["algorithms"] = algs;
    return j;
}

std::vector<ExperimentSpec> parse_specs(const Json& j) {
    std::vector<ExperimentSpec> out;
    if (j.is_array()) {
        for (const auto& x : j) out.push_back(ExperimentSpec::from_json(x));
    } else if (j.is_object() && j.contains("experiments")) {
        for (const auto& x : j.at("experiments")) out.push_back(ExperimentSpec::from_json(x));
    } else {
        out.push_back(ExperimentSpec::from_json(j));
    }
    std::set<std::string> names;
    for (const auto& s : out) {
        if (!names.insert(s.name).second) throw ConfigError("duplicate experiment name '" + s.name + "'");
    }
    return out;
}

std::vector<ExperimentSpec> load_spec_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file " + path.string());
    Json j;
    try {
        j = Json::parse(in, nullptr, true, true);
    } catch (const std::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    return parse_specs(j);
}

}  // namespace kidrec::harness
