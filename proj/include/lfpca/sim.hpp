#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lfpca/blockdetect.hpp"
#include "lfpca/model.hpp"

namespace lfpca::sim {

enum class DesignName { A, B };

DesignName parse_design(std::string_view name);
const char* to_string(DesignName name) noexcept;

/// Sub-intervals of [0, 1] carrying the localized components. A grid point on
/// a shared boundary belongs to the left interval.
inline constexpr std::array<std::array<double, 2>, 3> kSupports{{{0.0, 0.3}, {0.3, 0.6}, {0.6, 1.0}}};

/// Default score variances (6^2, 4^2, 2^2, 0.5^2, 0.25^2, 0.2^2, 0.15^2, 0.1^2).
inline constexpr std::array<double, 8> kDefaultEigenvalues{36.0, 16.0, 4.0, 0.25, 0.0625, 0.04, 0.0225, 0.01};

struct SimDesign {
    DesignName name = DesignName::A;
    std::vector<double> eigenvalues{kDefaultEigenvalues.begin(), kDefaultEigenvalues.end()};
    double noise_sd = 0.1;
    std::uint64_t seed = 1;

    static SimDesign make(DesignName name, double noise_sd = 0.1, std::uint64_t seed = 1);
};

/// Number of basis components: 8 for design A, 9 for design B (its first
/// component is split into two).
std::size_t component_count(const SimDesign& design);

/// Score variance of each basis component. Design B splits the first eigenvalue
/// into 0.7 and 0.3 of itself.
Vector component_variances(const SimDesign& design);

/// Index of the support interval (0, 1, 2) each basis component lives on.
std::vector<std::size_t> component_blocks(const SimDesign& design);

/// Number of leading (spline) components; the rest are the small Fourier terms.
std::size_t leading_count(const SimDesign& design);

/// P x T matrix of quadrature-orthonormal basis functions, one per column,
/// built by Gram-Schmidt in listed order. Throws InvalidArgument when the grid
/// does not span [0, 1].
Matrix build_basis(const SimDesign& design, const Grid& grid);

/// Grid partition induced by kSupports.
BlockPartition true_partition(const Grid& grid);

/// Gamma = sum_k lambda_k psi_k psi_k^T.
CovMatrix population_covariance(const SimDesign& design, const Grid& grid);

struct Sample {
    CurveSet noisy;
    CurveSet latent;
    BlockPartition truth;
};

/// n curves X = sum_k sqrt(lambda_k) xi_k psi_k with xi ~ N(0, 1) and additive
/// Gaussian noise of sd design.noise_sd. Deterministic in design.seed.
Sample generate(const SimDesign& design, std::size_t n, const Grid& grid);

/// |Pearson correlation| of two vectors over grid values; nullopt when either
/// one is constant.
std::optional<double> abs_pearson(const Vector& a, const Vector& b);

struct Matching {
    std::vector<std::optional<std::size_t>> truth_of;   // per estimated component
    std::vector<double> correlation;                    // |r| of the assigned pair, 0 if none
    std::vector<bool> constant;                         // estimated component has zero variance
};

/// Greedy one-to-one assignment of estimated components to truth columns in
/// descending |r| order.
Matching match_components(std::span<const Vector> estimated, const Matrix& truth);
Matching match_components(const LocalizedEigenSystem& estimated, const Matrix& truth);

struct SupportScore {
    double specificity = 1.0;
    double precision = 0.0;
    bool empty_estimate = false;   // precision undefined, reported as 0
};

/// Specificity TN / (TN + FP) and precision TP / (TP + FP) over {0, ..., p-1}.
SupportScore support_metrics(const std::vector<std::size_t>& estimated, const std::vector<std::size_t>& truth,
                             std::size_t p);

/// For each detected block, the true block with the largest index overlap
/// (lowest index on ties).
std::vector<std::size_t> align_blocks(const BlockPartition& detected, const BlockPartition& truth);

/// Sums estimated PVE over the detected blocks aligned to each true block and
/// divides by the true PVE; nullopt for a true block no detected block aligns to.
std::vector<std::optional<double>> pve_ratio(std::span<const double> estimated, std::span<const double> truth,
                                             const std::vector<std::size_t>& alignment);

/// Leading eigenvalue mass of each support over the total of all eigenvalues.
std::vector<double> true_pve_per_block(const SimDesign& design);

enum class Method { LFpca, FpcaTau };

struct StudyConfig {
    Method method = Method::LFpca;
    double tau = 0.0;                 // support threshold for Method::FpcaTau
    std::size_t m = 10;
    double denoise_pve = 0.99;
    DetectionConfig detection{};      // default: calibrated, Bonferroni quantile
    std::size_t grid_points = 1001;
};

std::string method_label(const StudyConfig& cfg);

struct MetricsRecord {
    std::size_t rep = 0;
    std::string method;
    std::string design;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::vector<double> specificity;                 // per true block
    std::vector<double> precision;
    std::vector<std::optional<double>> pve_ratio;
    std::size_t n_blocks_detected = 0;
    std::vector<IndexInterval> detected;
    std::vector<std::optional<std::size_t>> matched_truth;   // per estimated component
    std::optional<std::string> error;                        // set when the replication failed
};

/// SplitMix64 of the master seed combined with the replication index.
std::uint64_t replication_seed(std::uint64_t master, std::size_t rep);

struct Replication {
    MetricsRecord record;
    std::optional<LocalizedEigenSystem> system;
};

/// One replication: generate, center, detect, denoise, estimate, score.
Replication fit_replication(const SimDesign& design, std::size_t n, std::size_t rep, const StudyConfig& cfg);

/// `reps` independent replications seeded by replication_seed(design.seed, rep),
/// run in parallel and returned sorted by rep. Failures are recorded in the
/// record and do not stop the study.
std::vector<MetricsRecord> run_study(const SimDesign& design, std::size_t n, std::size_t reps,
                                     const StudyConfig& cfg);

/// One row per (rep, block): rep, method, block, specificity, precision,
/// pve_ratio, n_blocks_detected, design, n. Missing values are written as NA.
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records);

/// Type-7 quantile of a sample (linear interpolation between order statistics).
double quantile(std::vector<double> values, double q);

/// Median and quartiles per block for every metric.
nlohmann::json summarize(const std::vector<MetricsRecord>& records);

} // namespace lfpca::sim
