#include "lfpca/ingest.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace lfpca {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Cells are reported 1-based, rows counted from the first line of the file.
double parse_cell(std::string_view cell, std::size_t row, std::size_t col, std::string_view source) {
    const auto text = trim(cell);
    if (text.empty())
        throw FormatError(fmt::format("{}: row {}, column {}: missing value", source, row, col));
    const char* first = text.data();
    if (*first == '+') ++first;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
        throw FormatError(fmt::format("{}: row {}, column {}: '{}' is not a number", source, row, col, text));
    return value;
}

std::vector<std::vector<double>> read_table(std::istream& in, std::string_view source) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        std::vector<double> fields;
        std::string_view rest(line);
        std::size_t col = 0;
        while (true) {
            ++col;
            const auto comma = rest.find(',');
            fields.push_back(parse_cell(rest.substr(0, comma), row, col, source));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (!rows.empty() && fields.size() != rows.front().size())
            throw FormatError(fmt::format("{}: row {} has {} fields, expected {}", source, row, fields.size(),
                                          rows.front().size()));
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace

Layout parse_layout(std::string_view name) {
    if (name == "rows-are-curves" || name == "rows") return Layout::RowsAreCurves;
    if (name == "columns-are-curves" || name == "columns") return Layout::ColumnsAreCurves;
    throw InvalidArgument(fmt::format("unknown layout '{}'", name));
}

const char* to_string(Layout layout) noexcept {
    return layout == Layout::RowsAreCurves ? "rows-are-curves" : "columns-are-curves";
}

CurveSet parse_curves(std::istream& in, Layout layout, std::string_view source) {
    const auto table = read_table(in, source);
    if (table.empty()) throw FormatError(fmt::format("{}: no data", source));

    const std::size_t rows = table.size();
    const std::size_t cols = table.front().size();
    const bool by_rows = layout == Layout::RowsAreCurves;
    const std::size_t p = by_rows ? cols : rows;
    const std::size_t n = by_rows ? rows - 1 : cols - 1;
    if (n == 0) throw FormatError(fmt::format("{}: header present but no curves", source));
    if (p < 2) throw FormatError(fmt::format("{}: grid needs at least 2 points", source));

    Vector points(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
        points(static_cast<Eigen::Index>(i)) = by_rows ? table[0][i] : table[i][0];
        if (i > 0 && !(points(static_cast<Eigen::Index>(i)) > points(static_cast<Eigen::Index>(i - 1)))) {
            const auto row = by_rows ? 1 : i + 1;
            const auto col = by_rows ? i + 1 : 1;
            throw FormatError(
                fmt::format("{}: row {}, column {}: grid is not strictly increasing", source, row, col));
        }
    }

    Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t i = 0; i < p; ++i)
            values(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) =
                by_rows ? table[c + 1][i] : table[i][c + 1];

    return CurveSet(Grid::trapezoid(std::move(points)), std::move(values), false);
}

CurveSet load_curves(const std::filesystem::path& path, Layout layout) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    return parse_curves(in, layout, path.string());
}

void write_curves(std::ostream& out, const CurveSet& curves) {
    const auto& s = curves.grid().points();
    for (Eigen::Index i = 0; i < s.size(); ++i) fmt::print(out, "{}{:.17g}", i ? "," : "", s(i));
    out << '\n';
    const auto& v = curves.values();
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        for (Eigen::Index i = 0; i < v.cols(); ++i) fmt::print(out, "{}{:.17g}", i ? "," : "", v(r, i));
        out << '\n';
    }
}

void write_curves(const std::filesystem::path& path, const CurveSet& curves) {
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
    write_curves(out, curves);
}

CurveSet center(const CurveSet& curves) {
    if (curves.centered()) return curves;
    Matrix v = curves.values();
    const Eigen::RowVectorXd mean = v.colwise().mean();
    v.rowwise() -= mean;
    return CurveSet(curves.grid(), std::move(v), true);
}

} // namespace lfpca
