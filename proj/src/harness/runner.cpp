#include "kidrec/harness/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <ostream>

#include "kidrec/dataset_ops.hpp"
#include "kidrec/evaluation.hpp"
#include "kidrec/io.hpp"
#include "kidrec/knn.hpp"
#include "kidrec/mf.hpp"
#include "kidrec/rng.hpp"
#include "kidrec/synth.hpp"

namespace kidrec::harness {

RunContext RunContext::from_environment() {
    RunContext ctx;
    if (const char* dir = std::getenv("KIDREC_DATA_DIR")) ctx.data_dir = dir;
    else ctx.data_dir = std::filesystem::current_path();
    return ctx;
}

const Dataset& Materialized::at(const std::string& name) const {
    const auto it = datasets.find(name);
    if (it == datasets.end()) throw ConfigError("dataset '" + name + "' was not materialized");
    return it->second;
}

std::uint64_t stage_seed(const ExperimentSpec& spec, std::string_view stage) {
    return derive_seed(spec.seed, hash_name(stage));
}

namespace {

std::filesystem::path resolve(const RunContext& ctx, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative()) path = ctx.data_dir / path;
    return path;
}

SynthParams synth_params(const ExperimentSpec& spec, const DatasetStep& step) {
    const auto profile = step.args.value("profile", std::string("child"));
    SynthParams p;
    if (profile == "adult") p = adult_defaults();
    else if (profile == "child") p = child_defaults();
    else throw ConfigError("step '" + step.name + "': unknown profile '" + profile + "'");
    p.seed = stage_seed(spec, step.name);
    if (step.args.contains("params")) {
        const auto& j = step.args.at("params");
        p.user_count = j.value("user_count", p.user_count);
        p.item_count = j.value("item_count", p.item_count);
        p.target_rating_count = j.value("target_rating_count", p.target_rating_count);
        p.activity_exponent = j.value("activity_exponent", p.activity_exponent);
        p.item_popularity_exponent = j.value("item_popularity_exponent", p.item_popularity_exponent);
        p.children_fraction = j.value("children_fraction", p.children_fraction);
        if (j.contains("value_distribution")) p.value_distribution = j.at("value_distribution").get<std::array<double, 5>>();
        if (j.contains("source")) p.source = parse_source(j.at("source").get<std::string>());
        if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
    }
    return p;
}

Dataset run_step(const ExperimentSpec& spec, const DatasetStep& step, const Materialized& m, const RunContext& ctx,
                 std::vector<std::string>& notes) {
    const auto& a = step.args;
    if (step.op == "load_ml1m") {
        const auto ratings = resolve(ctx, a.at("ratings").get<std::string>());
        const auto movies = resolve(ctx, a.at("movies").get<std::string>());
        if (!std::filesystem::exists(ratings) || !std::filesystem::exists(movies)) {
            throw std::runtime_error("ML1M files not found at " + ratings.string() + " / " + movies.string() +
                                     " (set KIDREC_DATA_DIR to the directory holding ml-1m/)");
        }
        return load_ml1m(ratings, movies);
    }
    if (step.op == "load") {
        const auto ratings = resolve(ctx, a.at("ratings").get<std::string>());
        const auto items = a.contains("items") ? resolve(ctx, a.at("items").get<std::string>()) : std::filesystem::path{};
        return load_interchange(ratings, items);
    }
    if (step.op == "generate") {
        std::vector<ItemMeta> catalog;
        if (a.contains("catalog_from")) catalog = children_catalog(m.at(a.at("catalog_from").get<std::string>()));
        return generate_synthetic(synth_params(spec, step), catalog);
    }
    if (step.op == "filter") {
        return filter_min_ratings(m.at(a.at("input").get<std::string>()), a.at("min_ratings").get<std::size_t>());
    }
    if (step.op == "subsample") {
        const auto seed = a.value("seed", stage_seed(spec, step.name));
        return subsample(m.at(a.at("input").get<std::string>()), a.at("count").get<std::size_t>(), seed);
    }
    if (step.op == "kplus") {
        const auto& src = m.at(a.at("input").get<std::string>());
        const auto users = select_kplus_users(src, a.value("min_children", std::size_t{2}));
        const auto mode = a.value("mode", std::string("children_only"));
        RestrictMode rm;
        if (mode == "children_only") rm = RestrictMode::ChildrenOnly;
        else if (mode == "all_ratings") rm = RestrictMode::AllRatings;
        else throw ConfigError("step '" + step.name + "': unknown K+ mode '" + mode + "'");
        notes.push_back(step.name + ": " + std::to_string(users.size()) + " K+ users, mode " + mode);
        return restrict_to_users(src, users, rm);
    }
    if (step.op == "merge") {
        const auto matching_name = a.value("item_matching", std::string("by_title_year"));
        ItemMatching matching;
        if (matching_name == "by_title_year") matching = ItemMatching::ByTitleYear;
        else if (matching_name == "none") matching = ItemMatching::None;
        else throw ConfigError("step '" + step.name + "': unknown item_matching '" + matching_name + "'");
        const auto& names = a.at("inputs");
        Dataset acc = m.at(names.at(0).get<std::string>());
        for (std::size_t k = 1; k < names.size(); ++k) {
            auto r = merge(acc, m.at(names.at(k).get<std::string>()), matching);
            notes.push_back(step.name + ": unified " + std::to_string(r.unified_items) + " items, " +
                            std::to_string(r.collisions) + " colliding ratings dropped");
            acc = std::move(r.dataset);
        }
        return acc;
    }
    throw ConfigError("unknown op '" + step.op + "'");
}

void log_line(const RunContext& ctx, const std::string& line) {
    if (ctx.log) *ctx.log << line << std::endl;
}

std::string stats_text(const DatasetStats& s) {
    return std::to_string(s.users) + " users, " + std::to_string(s.items) + " items, " + std::to_string(s.ratings) + " ratings";
}

struct EvalSet {
    Dataset train;
    Dataset test;
};

// Evaluates one algorithm's whole sweep over the evaluation sets.
AlgorithmResult evaluate_sweep(const ExperimentSpec& spec, const AlgorithmSweep& sweep, const std::vector<EvalSet>& sets,
                               const RunContext& ctx) {
    AlgorithmResult result;
    result.kind = sweep.kind;
    const std::size_t n_points = sweep.values.size();
    std::vector<std::vector<double>> sq(n_points);
    std::vector<std::vector<char>> served(n_points);
    std::vector<std::vector<double>> fold_rmse(n_points);
    std::vector<Rating> sequence;

    for (std::size_t f = 0; f < sets.size(); ++f) {
        const auto& set = sets[f];
        Dataset knn_test;
        const Dataset* test = &set.test;
        if (sweep.kind != Algorithm::MF && spec.evaluation.knn_test_sample) {
            knn_test = subsample(set.test, spec.evaluation.knn_test_sample,
                                 stage_seed(spec, "knn_sample:" + std::to_string(f)));
            test = &knn_test;
        }
        const auto pairs = test->ratings();
        sequence.insert(sequence.end(), pairs.begin(), pairs.end());

        std::vector<std::vector<Prediction>> preds;
        if (sweep.kind == Algorithm::MF) {
            for (auto factors : sweep.values) {
                PredictorConfig cfg = sweep.base;
                cfg.latent_factors = factors;
                cfg.seed = stage_seed(spec, "mf");
                log_line(ctx, "  MF f=" + std::to_string(factors) + " fold " + std::to_string(f + 1) + "/" +
                                  std::to_string(sets.size()));
                const auto model = mf_train(set.train, cfg);
                std::vector<Prediction> col(pairs.size());
                for (std::size_t p = 0; p < pairs.size(); ++p) col[p] = mf_predict(model, pairs[p].user, pairs[p].item);
                preds.push_back(std::move(col));
            }
        } else {
            log_line(ctx, "  " + std::string(to_string(sweep.kind)) + " sweep fold " + std::to_string(f + 1) + "/" +
                              std::to_string(sets.size()) + " (" + std::to_string(pairs.size()) + " pairs)");
            preds = knn_predict_sweep(set.train, pairs, sweep.base, sweep.values);
        }
        for (std::size_t x = 0; x < n_points; ++x) {
            const auto report = evaluate(pairs, preds[x]);
            fold_rmse[x].push_back(report.rmse);
            sq[x].insert(sq[x].end(), report.per_pair_sq_errors.begin(), report.per_pair_sq_errors.end());
            for (const auto& p : preds[x]) served[x].push_back(p.served ? 1 : 0);
        }
    }

    std::vector<UserRef> users(sequence.size());
    for (std::size_t k = 0; k < sequence.size(); ++k) users[k] = sequence[k].user;
    for (std::size_t x = 0; x < n_points; ++x) {
        SweepPoint pt;
        pt.param = sweep.values[x];
        pt.fold_rmse = fold_rmse[x];
        double mean = 0.0;
        for (double r : fold_rmse[x]) mean += r;
        pt.rmse = mean / static_cast<double>(fold_rmse[x].size());
        pt.n = sq[x].size();
        double served_sum = 0.0;
        std::size_t served_n = 0;
        for (std::size_t k = 0; k < sq[x].size(); ++k) {
            if (served[x][k]) {
                served_sum += sq[x][k];
                ++served_n;
            }
        }
        pt.served_rmse = served_n ? std::sqrt(served_sum / static_cast<double>(served_n)) : 0.0;
        const auto cov = coverage(users, served[x]);
        pt.served_user_fraction = cov.users;
        pt.served_pair_fraction = cov.pairs;
        result.points.push_back(std::move(pt));
    }
    for (std::size_t x = 1; x < n_points; ++x) {
        if (result.points[x].rmse < result.points[result.best].rmse) result.best = x;
    }
    result.best_sq_errors = std::move(sq[result.best]);
    result.test_fingerprint = fingerprint(sequence);
    return result;
}

Json stats_json(const DatasetStats& s) { return Json{{"users", s.users}, {"items", s.items}, {"ratings", s.ratings}}; }

DatasetStats stats_from(const Json& j) {
    return {j.at("users").get<std::size_t>(), j.at("items").get<std::size_t>(), j.at("ratings").get<std::size_t>()};
}

}  // namespace

std::string fingerprint(std::span<const Rating> test) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    const auto mix = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001B3ULL;
        }
    };
    for (const auto& r : test) {
        mix(to_string(r.user));
        mix(",");
        mix(to_string(r.item));
        mix(",");
        mix(format_double(r.value));
        mix("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Materialized materialize(const ExperimentSpec& spec, const RunContext& ctx) {
    spec.validate();
    Materialized m;
    for (const auto& step : spec.datasets) {
        try {
            if (step.op == "split") {
                const auto& src = m.at(step.args.at("input").get<std::string>());
                const double fraction = step.args.value("train_fraction", 0.6);
                const auto seed = step.args.value("seed", stage_seed(spec, step.name));
                auto parts = split(src, fraction, seed);
                log_line(ctx, "[" + spec.name + "] " + step.name + ".train: " + stats_text(parts.train.stats()));
                log_line(ctx, "[" + spec.name + "] " + step.name + ".test: " + stats_text(parts.test.stats()));
                m.order.push_back(step.name + ".train");
                m.order.push_back(step.name + ".test");
                m.datasets.emplace(step.name + ".train", std::move(parts.train));
                m.datasets.emplace(step.name + ".test", std::move(parts.test));
                continue;
            }
            Dataset ds = run_step(spec, step, m, ctx, m.notes);
            log_line(ctx, "[" + spec.name + "] " + step.name + ": " + stats_text(ds.stats()));
            m.order.push_back(step.name);
            m.datasets.emplace(step.name, std::move(ds));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw std::runtime_error("experiment '" + spec.name + "', step '" + step.name + "': " + e.what());
        }
    }
    return m;
}

ExperimentResult run(const ExperimentSpec& spec, const RunContext& ctx) { return run(spec, materialize(spec, ctx), ctx); }

ExperimentResult run(const ExperimentSpec& spec, const Materialized& data, const RunContext& ctx) {
    ExperimentResult result;
    result.name = spec.name;
    result.seed = spec.seed;
    result.min_ratings_label = spec.min_ratings_label;
    result.notes = data.notes;

    std::vector<EvalSet> sets;
    const auto& ev = spec.evaluation;
    if (ev.protocol == Protocol::Holdout) {
        const auto& train = data.at(ev.train);
        const auto& test = data.at(ev.test);
        if (train.empty()) throw std::runtime_error("experiment '" + spec.name + "': training set '" + ev.train + "' is empty");
        if (test.empty()) throw std::runtime_error("experiment '" + spec.name + "': test set '" + ev.test + "' is empty");
        result.protocol = "holdout";
        result.train_stats = train.stats();
        result.test_stats = test.stats();
        sets.push_back({train, test});
    } else {
        const auto& ds = data.at(ev.dataset);
        if (ds.ratings().size() < ev.folds) {
            throw std::runtime_error("experiment '" + spec.name + "': dataset '" + ev.dataset + "' has fewer ratings than folds");
        }
        result.protocol = "cross_validation_" + std::to_string(ev.folds);
        result.train_stats = ds.stats();
        for (auto& fold : k_fold(ds, ev.folds, stage_seed(spec, "cv"))) sets.push_back({std::move(fold.train), std::move(fold.test)});
    }
    if (ev.knn_test_sample) {
        result.notes.push_back("UU/II evaluated on a seeded subsample of at most " + std::to_string(ev.knn_test_sample) +
                               " test pairs per evaluation set");
    }
    for (const auto& sweep : spec.algorithms) {
        log_line(ctx, "[" + spec.name + "] " + std::string(to_string(sweep.kind)));
        result.algorithms.push_back(evaluate_sweep(spec, sweep, sets, ctx));
    }
    return result;
}

const AlgorithmResult* ExperimentResult::find(Algorithm kind) const {
    for (const auto& a : algorithms) {
        if (a.kind == kind) return &a;
    }
    return nullptr;
}

Json ExperimentResult::to_json() const {
    Json j;
    j["name"] = name;
    j["seed"] = seed;
    j["protocol"] = protocol;
    j["min_ratings_label"] = min_ratings_label;
    j["train_stats"] = stats_json(train_stats);
    if (test_stats) j["test_stats"] = stats_json(*test_stats);
    j["notes"] = notes;
    j["algorithms"] = Json::array();
    for (const auto& a : algorithms) {
        Json x;
        x["kind"] = std::string(to_string(a.kind));
        x["best_param"] = a.best_point().param;
        x["best_rmse"] = a.best_point().rmse;
        x["test_fingerprint"] = a.test_fingerprint;
        x["points"] = Json::array();
        for (const auto& p : a.points) {
            x["points"].push_back(Json{{"param", p.param},
                                       {"rmse", p.rmse},
                                       {"fold_rmse", p.fold_rmse},
                                       {"served_rmse", p.served_rmse},
                                       {"served_user_fraction", p.served_user_fraction},
                                       {"served_pair_fraction", p.served_pair_fraction},
                                       {"n", p.n}});
        }
        x["best_sq_errors"] = a.best_sq_errors;
        j["algorithms"].push_back(std::move(x));
    }
    return j;
}

ExperimentResult ExperimentResult::from_json(const Json& j) {
    ExperimentResult r;
    r.name = j.at("name").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.protocol = j.at("protocol").get<std::string>();
    r.min_ratings_label = j.value("min_ratings_label", std::string());
    r.train_stats = stats_from(j.at("train_stats"));
    if (j.contains("test_stats")) r.test_stats = stats_from(j.at("test_stats"));
    r.notes = j.value("notes", std::vector<std::string>{});
    for (const auto& x : j.at("algorithms")) {
        AlgorithmResult a;
        a.kind = parse_algorithm(x.at("kind").get<std::string>());
        a.test_fingerprint = x.at("test_fingerprint").get<std::string>();
        const auto best_param = x.at("best_param").get<std::size_t>();
        for (const auto& p : x.at("points")) {
            SweepPoint pt;
            pt.param = p.at("param").get<std::size_t>();
            pt.rmse = p.at("rmse").get<double>();
            pt.fold_rmse = p.at("fold_rmse").get<std::vector<double>>();
            pt.served_rmse = p.at("served_rmse").get<double>();
            pt.served_user_fraction = p.at("served_user_fraction").get<double>();
            pt.served_pair_fraction = p.at("served_pair_fraction").get<double>();
            pt.n = p.at("n").get<std::size_t>();
            if (pt.param == best_param) a.best = a.points.size();
            a.points.push_back(std::move(pt));
        }
        if (a.points.empty()) throw ConfigError("result '" + r.name + "' has an empty sweep");
        a.best_sq_errors = x.at("best_sq_errors").get<std::vector<double>>();
        r.algorithms.push_back(std::move(a));
    }
    return r;
}

}  // namespace kidrec::harness
