#include "kidrec/harness/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "kidrec/io.hpp"

namespace kidrec::harness {

namespace {

constexpr Algorithm kColumns[] = {Algorithm::UU, Algorithm::II, Algorithm::MF};

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string counts(std::size_t train, const std::optional<std::size_t>& test) {
    return test ? std::to_string(train) + "::" + std::to_string(*test) : std::to_string(train);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::vector<std::string>> table_rows(const std::vector<ExperimentResult>& results) {
    std::vector<const ExperimentResult*> sorted;
    for (const auto& r : results) sorted.push_back(&r);
    std::stable_sort(sorted.begin(), sorted.end(), [](auto* x, auto* y) { return x->name < y->name; });

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Dataset", "Users", "Items", "Ratings", "Min # of ratings", "UU", "II", "MF"});
    for (const auto* r : sorted) {
        const auto& tr = r->train_stats;
        const auto& te = r->test_stats;
        std::vector<std::string> row{
            r->name,
            counts(tr.users, te ? std::optional(te->users) : std::nullopt),
            counts(tr.items, te ? std::optional(te->items) : std::nullopt),
            counts(tr.ratings, te ? std::optional(te->ratings) : std::nullopt),
            r->min_ratings_label.empty() ? "-" : r->min_ratings_label,
        };
        for (auto kind : kColumns) {
            const auto* a = r->find(kind);
            row.push_back(a ? fixed3(a->best_point().rmse) + " [" + std::to_string(a->best_point().param) + "]" : "-");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string render(const std::vector<std::vector<std::string>>& rows, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::Csv) {
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_field(row[c]);
            out << '\n';
        }
        return out.str();
    }
    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    const auto rule = [&] {
        out << '+';
        for (auto w : width) out << std::string(w + 2, '-') << '+';
        out << '\n';
    };
    rule();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out << '|';
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            // first column left aligned, numbers right aligned
            const auto pad = std::string(width[c] - rows[r][c].size(), ' ');
            out << ' ' << (c == 0 ? rows[r][c] + pad : pad + rows[r][c]) << " |";
        }
        out << '\n';
        if (r == 0) rule();
    }
    rule();
    return out.str();
}

}  // namespace

ReportFormat parse_report_format(std::string_view s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "table") return ReportFormat::Table;
    throw std::invalid_argument("unknown report format '" + std::string(s) + "' (expected csv or table)");
}

std::string report_table(const std::vector<ExperimentResult>& results, ReportFormat format) {
    return render(table_rows(results), format);
}

std::string report_sweeps(const std::vector<ExperimentResult>& results) {
    std::ostringstream out;
    out << "experiment,algorithm,param,rmse,served_rmse,served_user_fraction,served_pair_fraction,n,best\n";
    std::vector<const ExperimentResult*> sorted;
    for (const auto& r : results) sorted.push_back(&r);
    std::stable_sort(sorted.begin(), sorted.end(), [](auto* x, auto* y) { return x->name < y->name; });
    for (const auto* r : sorted) {
        for (const auto& a : r->algorithms) {
            for (std::size_t k = 0; k < a.points.size(); ++k) {
                const auto& p = a.points[k];
                out << csv_field(r->name) << ',' << to_string(a.kind) << ',' << p.param << ',' << format_double(p.rmse) << ','
                    << format_double(p.served_rmse) << ',' << format_double(p.served_user_fraction) << ','
                    << format_double(p.served_pair_fraction) << ',' << p.n << ',' << (k == a.best ? 1 : 0) << '\n';
            }
        }
    }
    return out.str();
}

ComparisonReport compare(const ExperimentResult& a, const ExperimentResult& b) {
    ComparisonReport report{a.name, b.name, {}};
    for (auto kind : kColumns) {
        const auto* x = a.find(kind);
        const auto* y = b.find(kind);
        if (!x || !y) continue;
        if (x->test_fingerprint != y->test_fingerprint || x->best_sq_errors.size() != y->best_sq_errors.size()) {
            throw MismatchedTestError(std::string(to_string(kind)) + ": '" + a.name + "' and '" + b.name +
                                      "' were evaluated on different test pairs");
        }
        AlgorithmComparison row;
        row.kind = kind;
        row.param_a = x->best_point().param;
        row.param_b = y->best_point().param;
        row.rmse_a = x->best_point().rmse;
        row.rmse_b = y->best_point().rmse;
        row.test = paired_t_test(x->best_sq_errors, y->best_sq_errors);
        report.rows.push_back(row);
    }
    if (report.rows.empty()) throw std::invalid_argument("compare: no algorithm present in both results");
    return report;
}

std::string render_comparison(const ComparisonReport& report, ReportFormat format) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Algorithm", "A", "B", "RMSE A", "RMSE B", "Direction", "t", "p", "p < 0.05"});
    for (const auto& r : report.rows) {
        const char* direction = r.rmse_a < r.rmse_b ? "A lower" : r.rmse_a > r.rmse_b ? "B lower" : "equal";
        rows.push_back({std::string(to_string(r.kind)), report.a + " [" + std::to_string(r.param_a) + "]",
                        report.b + " [" + std::to_string(r.param_b) + "]", fixed3(r.rmse_a), fixed3(r.rmse_b), direction,
                        r.test.defined ? format_double(r.test.t) : "undefined",
                        r.test.defined ? format_double(r.test.p) : "undefined", r.test.significant_at_05 ? "yes" : "no"});
    }
    return render(rows, format);
}

}  // namespace kidrec::harness
