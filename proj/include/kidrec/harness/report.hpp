#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kidrec/evaluation.hpp"
#include "kidrec/harness/runner.hpp"

namespace kidrec::harness {

enum class ReportFormat { Csv, Table };

ReportFormat parse_report_format(std::string_view s);

/// One row per result, sorted by name. Columns: Dataset, Users, Items,
/// Ratings, Min # of ratings, UU, II, MF. Holdout rows print train::test
/// counts; algorithm cells read "0.905 [80]".
std::string report_table(const std::vector<ExperimentResult>& results, ReportFormat format);

/// Every sweep point of every result, one CSV line each.
std::string report_sweeps(const std::vector<ExperimentResult>& results);

/// Thrown when two results were not evaluated on the same test sequence.
class MismatchedTestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AlgorithmComparison {
    Algorithm kind = Algorithm::MF;
    std::size_t param_a = 0;
    std::size_t param_b = 0;
    double rmse_a = 0.0;
    double rmse_b = 0.0;
    /// Paired over per-pair squared errors, a minus b.
    TTestResult test;
};

struct ComparisonReport {
    std::string a;
    std::string b;
    std::vector<AlgorithmComparison> rows;
};

/// Paired t-test per algorithm present in both results, at each result's
/// best sweep point.
ComparisonReport compare(const ExperimentResult& a, const ExperimentResult& b);

std::string render_comparison(const ComparisonReport& report, ReportFormat format);

}  // namespace kidrec::harness
