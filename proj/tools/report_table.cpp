#include "report_table.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "lfpca/errors.hpp"
#include "lfpca/sim.hpp"

namespace lfpca::cli {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    const auto last = s.find_last_not_of(" \t\r");
    return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
}

Spread spread(std::vector<double> v) {
    Spread s;
    s.count = v.size();
    if (v.empty()) return s;
    s.median = sim::quantile(v, 0.5);
    s.q1 = sim::quantile(v, 0.25);
    s.q3 = sim::quantile(v, 0.75);
    return s;
}

std::string cell(const Spread& s) {
    if (s.count == 0) return "NA";
    return fmt::format("{:.4f} [{:.4f}, {:.4f}]", s.median, s.q1, s.q3);
}

} // namespace

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    const auto file = path.string();

    std::string line;
    if (!std::getline(in, line)) throw FormatError(fmt::format("{}: empty file", file));
    const auto header = split(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[trim(header[i])] = i;
    for (const char* required :
         {"rep", "method", "block", "specificity", "precision", "pve_ratio", "n_blocks_detected"})
        if (!col.count(required)) throw FormatError(fmt::format("{}: missing required column '{}'", file, required));

    std::vector<MetricsRow> rows;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw FormatError(fmt::format("{}: row {}: expected {} fields, found {}", file, row_no, header.size(),
                                          cells.size()));
        auto text = [&](const char* name) { return trim(cells[col.at(name)]); };
        auto number = [&](const char* name) -> std::optional<double> {
            const auto t = text(name);
            if (t == "NA" || t.empty()) return std::nullopt;
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size())
                throw FormatError(fmt::format("{}: row {}: column '{}' is not a number: '{}'", file, row_no, name, t));
            return v;
        };
        auto integer = [&](const char* name) {
            const auto v = number(name);
            if (!v || *v != std::floor(*v))
                throw FormatError(fmt::format("{}: row {}: column '{}' must be an integer", file, row_no, name));
            return static_cast<long>(*v);
        };

        MetricsRow r;
        r.rep = integer("rep");
        r.block = integer("block");
        r.method = text("method");
        if (r.method.empty()) throw FormatError(fmt::format("{}: row {}: empty method", file, row_no));
        if (col.count("design")) r.design = text("design");
        if (col.count("n")) r.n = text("n");
        r.specificity = number("specificity");
        r.precision = number("precision");
        r.pve_ratio = number("pve_ratio");
        r.n_blocks_detected = number("n_blocks_detected");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<GroupSummary> summarize_rows(const std::vector<MetricsRow>& rows) {
    using Key = std::tuple<std::string, std::string, std::string, long>;
    std::map<Key, std::array<std::vector<double>, 3>> groups;
    for (const auto& r : rows) {
        auto& g = groups[Key{r.design, r.n, r.method, r.block}];
        if (r.specificity) g[0].push_back(*r.specificity);
        if (r.precision) g[1].push_back(*r.precision);
        if (r.pve_ratio) g[2].push_back(*r.pve_ratio);
    }
    std::vector<GroupSummary> out;
    for (const auto& [key, values] : groups) {
        GroupSummary s;
        std::tie(s.design, s.n, s.method, s.block) = key;
        s.specificity = spread(values[0]);
        s.precision = spread(values[1]);
        s.pve_ratio = spread(values[2]);
        out.push_back(std::move(s));
    }
    return out;
}

std::string format_table(const std::vector<GroupSummary>& groups) {
    std::vector<std::array<std::string, 8>> cells;
    cells.push_back({"design", "n", "method", "block", "count", "specificity", "precision", "pve_ratio"});
    for (const auto& g : groups)
        cells.push_back({g.design.empty() ? "-" : g.design, g.n.empty() ? "-" : g.n, g.method,
                         std::to_string(g.block), std::to_string(g.specificity.count), cell(g.specificity),
                         cell(g.precision), cell(g.pve_ratio)});

    std::array<std::size_t, 8> width{};
    for (const auto& row : cells)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

    std::string out;
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += fmt::format("{:<{}}", row[c], width[c]);
            out += c + 1 < row.size() ? "  " : "\n";
        }
    }
    return out;
}

std::string gnuplot_data(const std::vector<GroupSummary>& groups) {
    std::string out = "# index design n method block spec_q1 spec_median spec_q3 prec_q1 prec_median prec_q3 "
                      "pve_q1 pve_median pve_q3\n";
    auto triple = [](const Spread& s) {
        if (s.count == 0) return std::string("NaN NaN NaN");
        return fmt::format("{:.17g} {:.17g} {:.17g}", s.q1, s.median, s.q3);
    };
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        out += fmt::format("{} {} {} \"{}\" {} {} {} {}\n", i, g.design.empty() ? "-" : g.design,
                           g.n.empty() ? "-" : g.n, g.method, g.block, triple(g.specificity), triple(g.precision),
                           triple(g.pve_ratio));
    }
    return out;
}

} // namespace lfpca::cli
