#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lfpca::cli {

/// One row of a metrics CSV. `design` and `n` are optional columns and stay
/// empty when a file lacks them.
struct MetricsRow {
    std::string design;
    std::string n;
    std::string method;
    long rep = 0;
    long block = 0;
    std::optional<double> specificity;
    std::optional<double> precision;
    std::optional<double> pve_ratio;
    std::optional<double> n_blocks_detected;
};

/// Reads a metrics CSV. Throws FormatError naming the file and the column or
/// the 1-based row that is malformed, IoError when the file cannot be read.
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

struct Spread {
    std::size_t count = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

struct GroupSummary {
    std::string design;
    std::string n;
    std::string method;
    long block = 0;
    Spread specificity;
    Spread precision;
    Spread pve_ratio;
};

/// Pools rows by (design, n, method, block), sorted by that key.
std::vector<GroupSummary> summarize_rows(const std::vector<MetricsRow>& rows);

/// Aligned table with median [q1, q3] per metric.
std::string format_table(const std::vector<GroupSummary>& groups);

/// Whitespace-separated data for gnuplot's candlesticks style, one line per group.
std::string gnuplot_data(const std::vector<GroupSummary>& groups);

} // namespace lfpca::cli
