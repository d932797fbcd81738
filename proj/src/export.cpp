#include "lfpca/export.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace lfpca {

nlohmann::json eigensystem_to_json(const LocalizedEigenSystem& sys, const nlohmann::json& metadata) {
    const auto& s = sys.grid.points();
    nlohmann::json j;
    j["grid"] = std::vector<double>(s.data(), s.data() + s.size());

    nlohmann::json partition = nlohmann::json::array();
    for (std::size_t k = 0; k < sys.partition.size(); ++k) {
        const auto& b = sys.partition[k];
        partition.push_back({{"block", k + 1},
                             {"index", {b.lo + 1, b.hi + 1}},
                             {"grid", {s(static_cast<Eigen::Index>(b.lo)), s(static_cast<Eigen::Index>(b.hi))}}});
    }
    j["partition"] = partition;

    nlohmann::json comps = nlohmann::json::array();
    for (std::size_t l = 0; l < sys.components.size(); ++l) {
        const auto& c = sys.components[l];
        comps.push_back({{"eigenvalue", c.eigenvalue},
                         {"pve", sys.pve_per_component[l]},
                         {"block", c.block_id + 1},
                         {"rank", c.within_block_rank + 1},
                         {"degenerate", c.degenerate},
                         {"values", std::vector<double>(c.eigenfunction.data(),
                                                        c.eigenfunction.data() + c.eigenfunction.size())}});
    }
    j["components"] = comps;
    j["total_variance"] = sys.total_variance;
    j["pve_per_block"] = sys.pve_per_block;
    j["requested_components"] = sys.requested_components;
    j["clamped"] = sys.clamped;
    j["metadata"] = metadata;
    return j;
}

void write_components_csv(std::ostream& out, const LocalizedEigenSystem& sys) {
    const auto& s = sys.grid.points();
    out << "component,block,rank,s,value\n";
    for (std::size_t l = 0; l < sys.components.size(); ++l) {
        const auto& c = sys.components[l];
        for (Eigen::Index p = 0; p < s.size(); ++p)
            out << fmt::format("{},{},{},{:.17g},{:.17g}\n", l + 1, c.block_id + 1, c.within_block_rank + 1, s(p),
                               c.eigenfunction(p));
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    out << text;
    if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
    auto p = path;
    p += ".meta.json";
    return p;
}

void write_sidecar(const std::filesystem::path& path, const nlohmann::json& metadata) {
    write_text_file(sidecar_path(path), metadata.dump(2) + "\n");
}

} // namespace lfpca
