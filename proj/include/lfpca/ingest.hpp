#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "lfpca/model.hpp"

namespace lfpca {

enum class Layout {
    RowsAreCurves,     // first row = grid, each following row = one curve
    ColumnsAreCurves,  // first column = grid, each following column = one curve
};

Layout parse_layout(std::string_view name);
const char* to_string(Layout layout) noexcept;

/// Reads a dense CSV of curves sharing one grid. Throws IoError when the file
/// cannot be opened and FormatError (with row/column) on ragged rows,
/// non-numeric or missing cells and non-increasing grids.
CurveSet load_curves(const std::filesystem::path& path, Layout layout = Layout::RowsAreCurves);
CurveSet parse_curves(std::istream& in, Layout layout = Layout::RowsAreCurves, std::string_view source = "<stream>");

/// Writes curves in the rows-are-curves layout with 17 significant digits, so
/// that load_curves reads back the same doubles.
void write_curves(std::ostream& out, const CurveSet& curves);
void write_curves(const std::filesystem::path& path, const CurveSet& curves);

/// Subtracts the column means; the result is flagged centered.
CurveSet center(const CurveSet& curves);

} // namespace lfpca
