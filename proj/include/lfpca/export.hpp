#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "lfpca/model.hpp"

namespace lfpca {

/// Grid, partition (1-based inclusive intervals in index and grid units),
/// components and per-block PVE; `metadata` is stored verbatim.
nlohmann::json eigensystem_to_json(const LocalizedEigenSystem& sys, const nlohmann::json& metadata = {});

/// Long-format plot data: component, block, rank, s, value (ids 1-based).
void write_components_csv(std::ostream& out, const LocalizedEigenSystem& sys);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Metadata sidecar for an output file: `<path>.meta.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& path);
void write_sidecar(const std::filesystem::path& path, const nlohmann::json& metadata);

} // namespace lfpca
