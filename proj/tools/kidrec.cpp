// Command-line front end: prepare, run, report, histogram, compare.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "kidrec/harness/presets.hpp"
#include "kidrec/harness/report.hpp"
#include "kidrec/harness/runner.hpp"
#include "kidrec/io.hpp"

namespace fs = std::filesystem;
using namespace kidrec;
using namespace kidrec::harness;

namespace {

struct SpecSource {
    std::string spec_file;
    std::string preset_name;
    std::optional<std::uint64_t> seed;

    void attach(CLI::App* cmd) {
        auto* s = cmd->add_option("--spec", spec_file, "Experiment spec file (JSON)")->check(CLI::ExistingFile);
        auto* p = cmd->add_option("--preset", preset_name, "Bundled preset name");
        s->excludes(p);
        cmd->add_option("--seed", seed, "Override the seed of every experiment");
    }

    std::vector<ExperimentSpec> load() const {
        std::vector<ExperimentSpec> specs;
        if (!spec_file.empty()) specs = load_spec_file(spec_file);
        else if (!preset_name.empty()) specs = preset(preset_name, seed.value_or(1));
        else throw ConfigError("one of --spec or --preset is required");
        if (seed) {
            for (auto& s : specs) s.seed = *seed;
        }
        return specs;
    }
};

std::string safe_name(const std::string& name) {
    std::string out;
    for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::vector<ExperimentResult> read_results(const std::vector<std::string>& files) {
    std::vector<ExperimentResult> out;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw std::runtime_error("cannot open " + f);
        const Json j = Json::parse(in);
        const Json& list = j.contains("experiments") ? j.at("experiments") : j;
        if (list.is_array()) {
            for (const auto& x : list) out.push_back(ExperimentResult::from_json(x));
        } else {
            out.push_back(ExperimentResult::from_json(list));
        }
    }
    return out;
}

const ExperimentResult& pick(const std::vector<ExperimentResult>& rs, const std::string& name, const std::string& file) {
    if (name.empty()) {
        if (rs.size() != 1) throw std::runtime_error(file + " holds " + std::to_string(rs.size()) + " experiments; name one");
        return rs.front();
    }
    for (const auto& r : rs) {
        if (r.name == name) return r;
    }
    throw std::runtime_error("no experiment '" + name + "' in " + file);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collaborative-filtering experiments for child and adult rating data"};
    app.require_subcommand(1);
    std::string format_name = "table";
    std::string out_dir;

    auto* prepare = app.add_subcommand("prepare", "Materialize every dataset of a recipe as interchange files");
    SpecSource prepare_src;
    prepare_src.attach(prepare);
    prepare->add_option("--out", out_dir, "Output directory")->required();

    auto* run_cmd = app.add_subcommand("run", "Run experiments and print the results table");
    SpecSource run_src;
    run_src.attach(run_cmd);
    run_cmd->add_option("--out", out_dir, "Directory for results.json, sweeps.csv and the report");
    run_cmd->add_option("--format", format_name, "Report format")->check(CLI::IsMember({"csv", "table"}));
    bool quiet = false;
    run_cmd->add_flag("-q,--quiet", quiet, "No progress output on stderr");

    auto* report_cmd = app.add_subcommand("report", "Render a results table from stored results");
    std::vector<std::string> result_files;
    report_cmd->add_option("results", result_files, "results.json files")->required()->check(CLI::ExistingFile);
    report_cmd->add_option("--format", format_name, "Report format")->check(CLI::IsMember({"csv", "table"}));
    bool sweeps = false;
    report_cmd->add_flag("--sweeps", sweeps, "Print every sweep point instead of the summary table");

    auto* hist_cmd = app.add_subcommand("histogram", "Emit ratings-per-user histogram data");
    SpecSource hist_src;
    hist_src.attach(hist_cmd);
    std::string hist_dataset;
    std::string hist_ratings;
    hist_cmd->add_option("--dataset", hist_dataset, "Dataset name within the recipe");
    hist_cmd->add_option("--ratings", hist_ratings, "Interchange ratings CSV instead of a recipe")->check(CLI::ExistingFile);

    auto* cmp_cmd = app.add_subcommand("compare", "Paired t-test between two results at their best sweep points");
    std::string file_a, file_b, name_a, name_b;
    cmp_cmd->add_option("a", file_a, "First results.json")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("b", file_b, "Second results.json")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--experiment-a", name_a, "Experiment name within the first file");
    cmp_cmd->add_option("--experiment-b", name_b, "Experiment name within the second file");
    cmp_cmd->add_option("--format", format_name, "Report format")->check(CLI::IsMember({"csv", "table"}));

    CLI11_PARSE(app, argc, argv);

    try {
        auto ctx = RunContext::from_environment();
        const auto format = parse_report_format(format_name);

        if (*prepare) {
            fs::create_directories(out_dir);
            for (const auto& spec : prepare_src.load()) {
                const auto m = materialize(spec, ctx);
                const fs::path dir = fs::path(out_dir) / safe_name(spec.name);
                fs::create_directories(dir);
                for (const auto& name : m.order) {
                    const auto& ds = m.at(name);
                    write_interchange(dir / (name + ".csv"), ds);
                    std::ofstream items(dir / (name + ".items.csv"), std::ios::binary);
                    write_items(items, ds);
                    const auto s = ds.stats();
                    std::cout << spec.name << '\t' << name << '\t' << s.users << " users\t" << s.items << " items\t" << s.ratings
                              << " ratings\n";
                }
            }
        } else if (*run_cmd) {
            if (!quiet) ctx.log = &std::cerr;
            std::vector<ExperimentResult> results;
            for (const auto& spec : run_src.load()) results.push_back(run(spec, ctx));
            const auto table = report_table(results, format);
            std::cout << table;
            if (!out_dir.empty()) {
                fs::create_directories(out_dir);
                Json j = {{"experiments", Json::array()}};
                for (const auto& r : results) j["experiments"].push_back(r.to_json());
                write_file(fs::path(out_dir) / "results.json", j.dump(1) + "\n");
                write_file(fs::path(out_dir) / "sweeps.csv", report_sweeps(results));
                write_file(fs::path(out_dir) / (format == ReportFormat::Csv ? "report.csv" : "report.txt"), table);
            }
        } else if (*report_cmd) {
            const auto results = read_results(result_files);
            std::cout << (sweeps ? report_sweeps(results) : report_table(results, format));
        } else if (*hist_cmd) {
            std::optional<Dataset> ds;
            if (!hist_ratings.empty()) {
                ds = load_interchange(hist_ratings);
            } else {
                const auto specs = hist_src.load();
                if (specs.size() != 1) throw ConfigError("histogram needs exactly one experiment; got " + std::to_string(specs.size()));
                const auto m = materialize(specs.front(), ctx);
                ds = m.at(hist_dataset.empty() ? m.order.front() : hist_dataset);
            }
            write_histogram(std::cout, activity_histogram(*ds));
        } else if (*cmp_cmd) {
            const auto ra = read_results({file_a});
            const auto rb = read_results({file_b});
            std::cout << render_comparison(compare(pick(ra, name_a, file_a), pick(rb, name_b, file_b)), format);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
