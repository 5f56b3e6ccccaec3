#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kidrec/dataset_ops.hpp"
#include "kidrec/io.hpp"
#include "kidrec/harness/presets.hpp"
#include "kidrec/harness/report.hpp"
#include "kidrec/harness/runner.hpp"

using namespace kidrec;
using namespace kidrec::harness;

namespace {

Json tiny_spec_json(std::uint64_t seed = 3) {
    auto j = Json::parse(R"({
        "name": "tiny",
        "min_ratings_label": "2::2",
        "datasets": [
            {"name": "g", "op": "generate", "profile": "child",
             "params": {"user_count": 150, "item_count": 60, "target_rating_count": 1500}},
            {"name": "g2", "op": "filter", "input": "g", "min_ratings": 2},
            {"name": "s", "op": "split", "input": "g2"}
        ],
        "evaluation": {"protocol": "holdout", "train": "s.train", "test": "s.test"},
        "algorithms": {"uu": {"neighbors": [5, 20]}, "ii": {"neighbors": [5, 20]},
                       "mf": {"factors": [2, 4], "iterations": 10}}
    })");
    j["seed"] = seed;
    return j;
}

RunContext quiet() { return RunContext{std::filesystem::temp_directory_path(), nullptr}; }

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("kidrec_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("spec") {
    TEST_CASE("config errors are raised before any work") {
        auto j = tiny_spec_json();
        j["datasets"][1]["input"] = "nope";
        CHECK_THROWS_AS(ExperimentSpec::from_json(j), ConfigError);

        j = tiny_spec_json();
        j["datasets"][0]["op"] = "teleport";
        CHECK_THROWS_AS(ExperimentSpec::from_json(j), ConfigError);

        j = tiny_spec_json();
        j["algorithms"]["uu"]["neighbors"] = Json::array();
        CHECK_THROWS_AS(ExperimentSpec::from_json(j), ConfigError);

        j = tiny_spec_json();
        j["evaluation"]["test"] = "s.validation";
        CHECK_THROWS_AS(ExperimentSpec::from_json(j), ConfigError);

        j = tiny_spec_json();
        j["datasets"][1]["name"] = "g";
        CHECK_THROWS_AS(ExperimentSpec::from_json(j), ConfigError);

        // a step may not read a dataset defined after it
        j = tiny_spec_json();
        std::swap(j["datasets"][1], j["datasets"][2]);
        CHECK_THROWS_AS(ExperimentSpec::from_json(j), ConfigError);

        j = tiny_spec_json();
        j["algorithms"]["mf"]["learning_rate"] = -1.0;
        CHECK_THROWS_AS(ExperimentSpec::from_json(j), ConfigError);

        j = tiny_spec_json();
        j["algorithms"]["svdpp"] = Json::object();
        CHECK_THROWS_AS(ExperimentSpec::from_json(j), ConfigError);

        CHECK_THROWS_AS(ExperimentSpec::from_json(Json::parse("{}")), ConfigError);
    }

    TEST_CASE("json round trip") {
        const auto s = ExperimentSpec::from_json(tiny_spec_json());
        const auto back = ExperimentSpec::from_json(s.to_json());
        CHECK(back.to_json().dump() == s.to_json().dump());
        CHECK(back.algorithms.size() == 3);
        CHECK(back.algorithms[2].base.iterations == 10);
        auto second = tiny_spec_json(4);
        second["name"] = "tiny-2";
        CHECK(parse_specs(Json::array({tiny_spec_json(), second})).size() == 2);
        CHECK_THROWS_AS(parse_specs(Json::array({tiny_spec_json(), tiny_spec_json(4)})), ConfigError);
        CHECK(parse_specs(Json{{"experiments", Json::array({tiny_spec_json()})}}).size() == 1);
    }

    TEST_CASE("sweep defaults") {
        CHECK(default_neighborhood_sizes() == std::vector<std::size_t>{50, 80, 100, 120, 150, 200, 250});
        CHECK(default_latent_factors() == std::vector<std::size_t>{40, 60, 80, 120});
        auto j = tiny_spec_json();
        j["algorithms"] = Json{{"uu", Json::object()}, {"mf", Json::object()}};
        const auto s = ExperimentSpec::from_json(j);
        CHECK(s.algorithms[0].values == default_neighborhood_sizes());
        CHECK(s.algorithms[1].values == default_latent_factors());
        CHECK(s.algorithms[1].base.learning_rate == 0.07);
        CHECK(s.algorithms[1].base.regularization == 0.06);
        CHECK(s.algorithms[1].base.iterations == 100);
    }

    TEST_CASE("presets parse and validate") {
        for (const auto& name : preset_names()) {
            const auto specs = preset(name, 5);
            CHECK_FALSE(specs.empty());
            for (const auto& s : specs) CHECK(s.seed == 5);
        }
        CHECK_THROWS_AS(preset("no-such-preset"), ConfigError);
        CHECK(preset_child_thresholds() == std::vector<std::size_t>{2, 10, 20});
    }
}

TEST_SUITE("runner") {
    TEST_CASE("tiny holdout run: stats, best points, determinism") {
        const auto spec = ExperimentSpec::from_json(tiny_spec_json());
        const auto data = materialize(spec, quiet());
        const auto r = run(spec, data, quiet());
        CHECK(r.protocol == "holdout");
        CHECK(r.train_stats == data.at("s.train").stats());
        CHECK(r.test_stats == data.at("s.test").stats());
        REQUIRE(r.algorithms.size() == 3);
        for (const auto& a : r.algorithms) {
            REQUIRE(a.points.size() == 2);
            for (const auto& p : a.points) {
                CHECK(a.best_point().rmse <= p.rmse);
                CHECK(p.n == data.at("s.test").ratings().size());
                CHECK(p.served_user_fraction >= 0.0);
                CHECK(p.served_user_fraction <= 1.0);
            }
            CHECK(a.best_sq_errors.size() == data.at("s.test").ratings().size());
            CHECK(a.test_fingerprint == fingerprint(data.at("s.test").ratings()));
        }
        const auto again = run(spec, quiet());
        CHECK(again.to_json().dump() == r.to_json().dump());
        CHECK(report_table({again}, ReportFormat::Table) == report_table({r}, ReportFormat::Table));
        const auto other = run(ExperimentSpec::from_json(tiny_spec_json(4)), quiet());
        CHECK(other.to_json().dump() != r.to_json().dump());
    }

    TEST_CASE("stats match a recount of the written interchange files") {
        const auto spec = ExperimentSpec::from_json(tiny_spec_json());
        const auto data = materialize(spec, quiet());
        const auto dir = scratch_dir("stats");
        for (const auto& name : data.order) {
            const auto path = dir / (name + ".csv");
            write_interchange(path, data.at(name));
            std::ifstream in(path);
            std::string line;
            std::getline(in, line);
            std::set<std::string> users, items;
            std::size_t n = 0;
            while (std::getline(in, line)) {
                const auto c1 = line.find(',');
                const auto c2 = line.find(',', c1 + 1);
                users.insert(line.substr(0, c1));
                items.insert(line.substr(c1 + 1, c2 - c1 - 1));
                ++n;
            }
            CHECK(data.at(name).stats() == DatasetStats{users.size(), items.size(), n});
        }
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("one rating as both train and test") {
        const auto dir = scratch_dir("one");
        write_interchange(dir / "one.csv",
                          Dataset::from_ratings({{{Source::Child, 1}, {Source::Child, 1}, 4.0, Source::Child}}));
        Json j = Json::parse(R"({
            "name": "degenerate",
            "datasets": [{"name": "d", "op": "load", "ratings": "one.csv"}],
            "evaluation": {"protocol": "holdout", "train": "d", "test": "d"},
            "algorithms": {"uu": {"neighbors": [1]}, "ii": {"neighbors": [1]}, "mf": {"factors": [1], "iterations": 3}}
        })");
        const auto r = run(ExperimentSpec::from_json(j), RunContext{dir, nullptr});
        const auto& uu = r.find(Algorithm::UU)->best_point();
        CHECK(uu.served_user_fraction == 0.0);
        CHECK(uu.served_pair_fraction == 0.0);
        CHECK(uu.rmse == 0.0);
        CHECK(std::isfinite(r.find(Algorithm::MF)->best_point().rmse));
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("empty sets and failing steps name the culprit") {
        auto j = tiny_spec_json();
        j["datasets"][1]["min_ratings"] = 100000;
        const auto spec = ExperimentSpec::from_json(j);
        try {
            run(spec, quiet());
            FAIL("expected an error");
        } catch (const std::runtime_error& e) {
            const std::string what = e.what();
            CHECK(what.find("tiny") != std::string::npos);
            CHECK((what.find("empty") != std::string::npos || what.find("step") != std::string::npos));
        }
        Json missing = Json::parse(R"({
            "name": "missing",
            "datasets": [{"name": "d", "op": "load", "ratings": "does-not-exist.csv"}],
            "evaluation": {"protocol": "holdout", "train": "d", "test": "d"},
            "algorithms": {"mf": {"factors": [1]}}
        })");
        try {
            run(ExperimentSpec::from_json(missing), quiet());
            FAIL("expected an error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find("step 'd'") != std::string::npos);
        }
    }

    TEST_CASE("cross-validation reports the mean of fold rmses") {
        auto j = tiny_spec_json();
        j["evaluation"] = Json{{"protocol", "cross_validation"}, {"dataset", "g2"}, {"folds", 3}};
        j["algorithms"] = Json{{"mf", Json{{"factors", {2}}, {"iterations", 5}}}};
        const auto r = run(ExperimentSpec::from_json(j), quiet());
        CHECK(r.protocol == "cross_validation_3");
        CHECK_FALSE(r.test_stats);
        const auto& p = r.algorithms[0].best_point();
        REQUIRE(p.fold_rmse.size() == 3);
        CHECK(p.rmse == doctest::Approx((p.fold_rmse[0] + p.fold_rmse[1] + p.fold_rmse[2]) / 3.0).epsilon(1e-14));
    }

    TEST_CASE("result json round trip") {
        const auto r = run(ExperimentSpec::from_json(tiny_spec_json()), quiet());
        const auto back = ExperimentResult::from_json(Json::parse(r.to_json().dump()));
        CHECK(back.to_json().dump() == r.to_json().dump());
        CHECK(report_table({back}, ReportFormat::Csv) == report_table({r}, ReportFormat::Csv));
    }
}

TEST_SUITE("report") {
    ExperimentResult fake(const std::string& name, double uu, std::size_t k) {
        ExperimentResult r;
        r.name = name;
        r.protocol = "cross_validation_5";
        r.min_ratings_label = "20";
        r.train_stats = {6040, 3706, 1000209};
        AlgorithmResult a;
        a.kind = Algorithm::UU;
        a.points = {{50, uu + 0.01, {}, 0, 1, 1, 10}, {k, uu, {}, 0, 1, 1, 10}};
        a.best = 1;
        a.test_fingerprint = "x";
        a.best_sq_errors = {0.1, 0.4, 0.2, 0.9};
        r.algorithms.push_back(a);
        return r;
    }

    TEST_CASE("cells, sorting and formats") {
        const auto csv = report_table({fake("b", 0.9049, 80), fake("a", 0.8762, 120)}, ReportFormat::Csv);
        CHECK(csv ==
              "Dataset,Users,Items,Ratings,Min # of ratings,UU,II,MF\n"
              "a,6040,3706,1000209,20,0.876 [120],-,-\n"
              "b,6040,3706,1000209,20,0.905 [80],-,-\n");
        auto holdout = fake("h", 1.0, 10);
        holdout.test_stats = DatasetStats{3, 4, 5};
        CHECK(report_table({holdout}, ReportFormat::Csv).find("h,6040::3,3706::4,1000209::5,") != std::string::npos);
        const auto table = report_table({fake("a", 0.905, 80)}, ReportFormat::Table);
        CHECK(table.find("| a ") != std::string::npos);
        CHECK(table.find("0.905 [80]") != std::string::npos);
        CHECK(table.front() == '+');
        auto quoted = fake("adult, 20", 1.0, 10);
        CHECK(report_table({quoted}, ReportFormat::Csv).find("\"adult, 20\"") != std::string::npos);
        CHECK_THROWS(parse_report_format("xml"));
        const auto sweeps = report_sweeps({fake("a", 0.9, 80)});
        CHECK(sweeps.find("a,UU,80,0.9,") != std::string::npos);
    }

    TEST_CASE("compare") {
        const auto a = fake("a", 0.9, 80);
        auto self = compare(a, a);
        REQUIRE(self.rows.size() == 1);
        CHECK(self.rows[0].test.t == 0.0);
        CHECK(self.rows[0].test.p == 1.0);
        CHECK(render_comparison(self, ReportFormat::Csv).find("equal") != std::string::npos);

        auto b = fake("b", 0.8, 100);
        b.algorithms[0].best_sq_errors = {0.2, 0.3, 0.1, 0.5};
        const auto c = compare(a, b);
        CHECK(c.rows[0].rmse_b == 0.8);
        CHECK(c.rows[0].test.defined);

        b.algorithms[0].test_fingerprint = "y";
        CHECK_THROWS_AS(compare(a, b), MismatchedTestError);
        b.algorithms[0].kind = Algorithm::MF;
        CHECK_THROWS_AS(compare(a, b), std::invalid_argument);
    }
}
