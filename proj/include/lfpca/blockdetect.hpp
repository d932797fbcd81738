#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lfpca/model.hpp"

namespace lfpca {

enum class DetectionMethod {
    ContiguousCut,   // finest contiguous partition with no |r| > tau across a cut
    Components,      // components of the graph {|r| > tau}, split into contiguous runs
};

DetectionMethod parse_detection_method(std::string_view name);
const char* to_string(DetectionMethod method) noexcept;

/// Either an explicit correlation threshold or a calibration quantile. With
/// neither set, the quantile defaults to bonferroni_quantile(P).
struct DetectionConfig {
    DetectionMethod method = DetectionMethod::ContiguousCut;
    std::optional<double> threshold;
    std::optional<double> quantile;
    bool report_threshold = true;

    nlohmann::json to_json() const;
    static DetectionConfig from_json(const nlohmann::json& j);
};

struct Detection {
    BlockPartition partition;
    double threshold = 0.0;
    std::optional<double> quantile;   // set when the threshold was calibrated
};

/// Correlation matrix of a covariance. Throws DegenerateInput naming the first
/// grid index with zero variance.
Matrix correlation_matrix(const CovMatrix& g);

Detection detect_blocks(const CovMatrix& g, const DetectionConfig& cfg);

/// q-quantile of |r| for the sample correlation of two independent Gaussian
/// samples of size n (exact, via the Student t transform of r).
double calibrate_threshold(std::size_t n, double q);

/// 1 - alpha / (P (P - 1) / 2): family-wise control over all off-diagonal pairs.
double bonferroni_quantile(std::size_t p, double alpha = 0.01);

struct Support {
    std::vector<std::size_t> indices;
    bool empty() const noexcept { return indices.empty(); }
};

/// Per-function support {p : |psi(s_p)| > tau}, used by the thresholded-FPCA
/// baseline.
std::vector<Support> blocks_from_eigenfunctions(std::span<const Vector> funcs, double tau);

} // namespace lfpca
