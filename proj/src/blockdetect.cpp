#include "lfpca/blockdetect.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "lfpca/kernels.hpp"

namespace lfpca {

namespace {

std::vector<std::size_t> contiguous_ends(const std::vector<std::size_t>& reach) {
    std::vector<std::size_t> ends;
    std::size_t furthest = 0;
    for (std::size_t c = 0; c < reach.size(); ++c) {
        furthest = std::max(furthest, reach[c]);
        if (furthest <= c) ends.push_back(c);
    }
    return ends;
}

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

std::vector<std::size_t> component_run_ends(const Matrix& r, double tau) {
    const auto p = static_cast<std::size_t>(r.rows());
    DisjointSets sets(p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (std::abs(r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) > tau) sets.unite(i, j);

    std::vector<std::size_t> ends;
    for (std::size_t i = 0; i + 1 < p; ++i)
        if (sets.find(i) != sets.find(i + 1)) ends.push_back(i);
    ends.push_back(p - 1);
    return ends;
}

} // namespace

DetectionMethod parse_detection_method(std::string_view name) {
    if (name == "contiguous-cut") return DetectionMethod::ContiguousCut;
    if (name == "components") return DetectionMethod::Components;
    throw InvalidArgument(fmt::format("unknown detection method '{}'", name));
}

const char* to_string(DetectionMethod method) noexcept {
    return method == DetectionMethod::ContiguousCut ? "contiguous-cut" : "components";
}

nlohmann::json DetectionConfig::to_json() const {
    nlohmann::json j;
    j["method"] = to_string(method);
    if (threshold) {
        j["threshold"] = *threshold;
    } else {
        j["calibration"] = {{"quantile", quantile ? nlohmann::json(*quantile) : nlohmann::json(nullptr)}};
    }
    j["report_threshold"] = report_threshold;
    return j;
}

DetectionConfig DetectionConfig::from_json(const nlohmann::json& j) {
    DetectionConfig cfg;
    try {
        cfg.method = parse_detection_method(j.at("method").get<std::string>());
        if (j.contains("threshold") && j.contains("calibration"))
            throw InvalidArgument("detection config sets both threshold and calibration");
        if (j.contains("threshold")) cfg.threshold = j.at("threshold").get<double>();
        if (j.contains("calibration")) {
            const auto& q = j.at("calibration").at("quantile");
            if (!q.is_null()) cfg.quantile = q.get<double>();
        }
        cfg.report_threshold = j.value("report_threshold", true);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(fmt::format("detection config: {}", e.what()));
    }
    return cfg;
}

Matrix correlation_matrix(const CovMatrix& g) {
    const auto& e = g.entries();
    const auto p = e.rows();
    Vector inv_sd(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        if (!(e(i, i) > 0.0))
            throw DegenerateInput(fmt::format("zero variance at grid index {}: correlation undefined", i));
        inv_sd(i) = 1.0 / std::sqrt(e(i, i));
    }
    Matrix r = inv_sd.asDiagonal() * e * inv_sd.asDiagonal();
    r.diagonal().setOnes();
    return r;
}

double calibrate_threshold(std::size_t n, double q) {
    if (n < 2) throw InvalidArgument("threshold calibration needs n >= 2");
    if (!(q > 0.0 && q < 1.0)) throw InvalidArgument(fmt::format("quantile {} outside (0, 1)", q));
    if (n == 2) return 1.0;
    // r sqrt(n-2) / sqrt(1 - r^2) ~ t_{n-2} under independence.
    const double df = static_cast<double>(n - 2);
    const boost::math::students_t dist(df);
    const double t = boost::math::quantile(dist, 0.5 * (1.0 + q));
    return t / std::sqrt(df + t * t);
}

double bonferroni_quantile(std::size_t p, double alpha) {
    if (p < 2) throw InvalidArgument("bonferroni quantile needs p >= 2");
    const double pairs = 0.5 * static_cast<double>(p) * static_cast<double>(p - 1);
    return 1.0 - alpha / pairs;
}

Detection detect_blocks(const CovMatrix& g, const DetectionConfig& cfg) {
    if (cfg.threshold && cfg.quantile) throw InvalidArgument("set either a threshold or a quantile, not both");

    double tau = 0.0;
    std::optional<double> quantile;
    if (cfg.threshold) {
        tau = *cfg.threshold;
        if (!(tau >= 0.0 && tau < 1.0)) throw InvalidArgument(fmt::format("threshold {} outside [0, 1)", tau));
    } else {
        if (g.sample_size() < 2)
            throw InvalidArgument("threshold calibration needs the covariance's sample size (N >= 2)");
        quantile = cfg.quantile.value_or(bonferroni_quantile(g.size()));
        tau = calibrate_threshold(g.sample_size(), *quantile);
    }

    const Matrix r = correlation_matrix(g);
    std::vector<std::size_t> ends;
    switch (cfg.method) {
    case DetectionMethod::ContiguousCut:
        ends = contiguous_ends(kernels::omp::correlation_reach(r, tau));
        break;
    case DetectionMethod::Components:
        ends = component_run_ends(r, tau);
        break;
    }
    return Detection{BlockPartition::from_ends(ends, g.size()), tau, quantile};
}

std::vector<Support> blocks_from_eigenfunctions(std::span<const Vector> funcs, double tau) {
    if (funcs.empty()) throw InvalidArgument("no eigenfunctions to threshold");
    if (!(tau > 0.0)) throw InvalidArgument("support threshold must be positive");
    std::vector<Support> out;
    out.reserve(funcs.size());
    for (const auto& f : funcs) {
        Support s;
        for (Eigen::Index i = 0; i < f.size(); ++i)
            if (std::abs(f(i)) > tau) s.indices.push_back(static_cast<std::size_t>(i));
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace lfpca
