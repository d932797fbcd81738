#include "lfpca/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <tuple>

#include <fmt/format.h>

#include "lfpca/bspline.hpp"
#include "lfpca/covariance.hpp"
#include "lfpca/ingest.hpp"
#include "lfpca/lfpca.hpp"

namespace lfpca::sim {

namespace {

constexpr double kBoundaryTol = 1e-9;

struct Fourier {
    int j;
    bool sine;
    double frequency;    // multiple of pi
    std::size_t block;
};

// sin(j pi s) for even j, cos((j+1) pi s) for odd j; each restricted to one support.
constexpr std::array<Fourier, 5> kFourier{{
    {4, true, 4.0, 1},
    {5, false, 6.0, 2},
    {6, true, 6.0, 0},
    {7, false, 8.0, 1},
    {8, true, 8.0, 2},
}};

std::size_t support_of(double s) {
    if (s <= kSupports[0][1] + kBoundaryTol) return 0;
    if (s <= kSupports[1][1] + kBoundaryTol) return 1;
    return 2;
}

Vector masked(Vector v, const Vector& points, std::size_t block) {
    for (Eigen::Index p = 0; p < points.size(); ++p)
        if (support_of(points(p)) != block) v(p) = 0.0;
    return v;
}

std::string na_or(const std::optional<double>& v) {
    return v ? fmt::format("{:.17g}", *v) : std::string("NA");
}

} // namespace

DesignName parse_design(std::string_view name) {
    if (name == "A" || name == "a") return DesignName::A;
    if (name == "B" || name == "b") return DesignName::B;
    throw InvalidArgument(fmt::format("unknown design '{}' (expected A or B)", name));
}

const char* to_string(DesignName name) noexcept { return name == DesignName::A ? "A" : "B"; }

SimDesign SimDesign::make(DesignName name, double noise_sd, std::uint64_t seed) {
    if (!(noise_sd >= 0.0)) throw InvalidArgument("noise sd must be non-negative");
    SimDesign d;
    d.name = name;
    d.noise_sd = noise_sd;
    d.seed = seed;
    return d;
}

std::size_t component_count(const SimDesign& design) { return design.name == DesignName::A ? 8 : 9; }

std::size_t leading_count(const SimDesign& design) { return design.name == DesignName::A ? 3 : 4; }

Vector component_variances(const SimDesign& design) {
    if (design.eigenvalues.size() != 8) throw InvalidArgument("a design needs exactly 8 eigenvalues");
    const auto& l = design.eigenvalues;
    if (design.name == DesignName::A) return Eigen::Map<const Vector>(l.data(), 8);
    Vector v(9);
    v << 0.7 * l[0], 0.3 * l[0], l[1], l[2], l[3], l[4], l[5], l[6], l[7];
    return v;
}

std::vector<std::size_t> component_blocks(const SimDesign& design) {
    std::vector<std::size_t> blocks =
        design.name == DesignName::A ? std::vector<std::size_t>{0, 1, 2} : std::vector<std::size_t>{0, 0, 1, 2};
    for (const auto& f : kFourier) blocks.push_back(f.block);
    return blocks;
}

Matrix build_basis(const SimDesign& design, const Grid& grid) {
    if (std::abs(grid.front()) > kBoundaryTol || std::abs(grid.back() - 1.0) > kBoundaryTol)
        throw InvalidArgument("simulation designs need a grid spanning [0, 1]");
    const Vector& s = grid.points();

    const BSplineBasis global(clamped_cubic_knots(0.0, 1.0, {0.3, 0.375, 0.45, 0.525, 0.6, 0.7, 0.8, 0.9}), 3);
    std::vector<Vector> raw;
    if (design.name == DesignName::A) {
        raw.push_back(masked(global.evaluate(1, s), s, 0));
    } else {
        const BSplineBasis local(clamped_cubic_knots(0.0, 0.3, {0.06, 0.12, 0.18, 0.24}), 3);
        raw.push_back(masked(local.evaluate(2, s), s, 0));
        raw.push_back(masked(local.evaluate(4, s), s, 0));
    }
    raw.push_back(masked(global.evaluate(5, s), s, 1));
    raw.push_back(masked(global.evaluate(9, s), s, 2));
    for (const auto& f : kFourier) {
        const Vector arg = (f.frequency * std::numbers::pi) * s;
        const Vector v = f.sine ? Vector(std::numbers::sqrt2 * arg.array().sin())
                                : Vector(std::numbers::sqrt2 * arg.array().cos());
        raw.push_back(masked(v, s, f.block));
    }

    Matrix basis(s.size(), static_cast<Eigen::Index>(raw.size()));
    for (std::size_t k = 0; k < raw.size(); ++k) {
        Vector v = raw[k];
        for (std::size_t i = 0; i < k; ++i) {
            const auto col = basis.col(static_cast<Eigen::Index>(i));
            v -= grid.inner(v, col) * col;
        }
        const double norm = grid.norm(v);
        if (!(norm > 1e-8)) throw InvalidArgument("basis function vanishes on this grid");
        basis.col(static_cast<Eigen::Index>(k)) = v / norm;
    }
    return basis;
}

BlockPartition true_partition(const Grid& grid) {
    std::vector<std::size_t> ends;
    const Vector& s = grid.points();
    for (Eigen::Index p = 0; p + 1 < s.size(); ++p)
        if (support_of(s(p)) != support_of(s(p + 1))) ends.push_back(static_cast<std::size_t>(p));
    ends.push_back(grid.size() - 1);
    if (ends.size() != kSupports.size()) throw InvalidArgument("grid does not resolve all three supports");
    return BlockPartition::from_ends(ends, grid.size());
}

CovMatrix population_covariance(const SimDesign& design, const Grid& grid) {
    const Matrix basis = build_basis(design, grid);
    const Vector lambda = component_variances(design);
    Matrix g = basis * lambda.asDiagonal() * basis.transpose();
    g = 0.5 * (g + g.transpose());
    return CovMatrix(grid, std::move(g), 0);
}

Sample generate(const SimDesign& design, std::size_t n, const Grid& grid) {
    if (n < 2) throw InvalidArgument("generate needs n >= 2");
    const Matrix basis = build_basis(design, grid);
    const Vector sd = component_variances(design).cwiseSqrt();
    const auto rows = static_cast<Eigen::Index>(n);

    std::mt19937_64 rng(design.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix scores(rows, sd.size());
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < sd.size(); ++k) scores(i, k) = sd(k) * normal(rng);
    Matrix latent = scores * basis.transpose();

    Matrix noisy = latent;
    if (design.noise_sd > 0.0)
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index p = 0; p < noisy.cols(); ++p) noisy(i, p) += design.noise_sd * normal(rng);

    return Sample{CurveSet(grid, std::move(noisy)), CurveSet(grid, std::move(latent)), true_partition(grid)};
}

std::optional<double> abs_pearson(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw InvalidArgument("correlation of vectors with different lengths");
    const Vector da = a.array() - a.mean();
    const Vector db = b.array() - b.mean();
    const double na = da.norm(), nb = db.norm();
    if (!(na > 0.0) || !(nb > 0.0)) return std::nullopt;
    return std::min(1.0, std::abs(da.dot(db)) / (na * nb));
}

Matching match_components(std::span<const Vector> estimated, const Matrix& truth) {
    if (estimated.empty()) throw InvalidArgument("no estimated components to match");
    Matching m;
    m.truth_of.assign(estimated.size(), std::nullopt);
    m.correlation.assign(estimated.size(), 0.0);
    m.constant.assign(estimated.size(), false);

    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < estimated.size(); ++i) {
        for (Eigen::Index j = 0; j < truth.cols(); ++j) {
            const auto r = abs_pearson(estimated[i], truth.col(j));
            if (!r) {
                if (estimated[i].size() > 0 && (estimated[i].array() == estimated[i](0)).all()) m.constant[i] = true;
                continue;
            }
            pairs.emplace_back(*r, i, static_cast<std::size_t>(j));
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    std::vector<bool> truth_used(static_cast<std::size_t>(truth.cols()), false);
    for (const auto& [r, i, j] : pairs) {
        if (m.truth_of[i] || truth_used[j]) continue;
        m.truth_of[i] = j;
        m.correlation[i] = r;
        truth_used[j] = true;
    }
    return m;
}

Matching match_components(const LocalizedEigenSystem& estimated, const Matrix& truth) {
    std::vector<Vector> funcs;
    funcs.reserve(estimated.components.size());
    for (const auto& c : estimated.components) funcs.push_back(c.eigenfunction);
    return match_components(funcs, truth);
}

SupportScore support_metrics(const std::vector<std::size_t>& estimated, const std::vector<std::size_t>& truth,
                             std::size_t p) {
    std::vector<char> in_est(p, 0), in_truth(p, 0);
    for (auto i : estimated) {
        if (i >= p) throw InvalidArgument(fmt::format("support index {} outside 0..{}", i, p - 1));
        in_est[i] = 1;
    }
    for (auto i : truth) {
        if (i >= p) throw InvalidArgument(fmt::format("support index {} outside 0..{}", i, p - 1));
        in_truth[i] = 1;
    }
    std::size_t tn = 0, fp = 0, tp = 0;
    for (std::size_t i = 0; i < p; ++i) {
        if (in_est[i] && in_truth[i]) ++tp;
        else if (in_est[i]) ++fp;
        else if (!in_truth[i]) ++tn;
    }
    SupportScore out;
    out.specificity = tn + fp == 0 ? 1.0 : static_cast<double>(tn) / static_cast<double>(tn + fp);
    out.empty_estimate = tp + fp == 0;
    out.precision = out.empty_estimate ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    return out;
}

std::vector<std::size_t> align_blocks(const BlockPartition& detected, const BlockPartition& truth) {
    if (detected.grid_size() != truth.grid_size()) throw InvalidArgument("partitions cover different grids");
    std::vector<std::size_t> out;
    out.reserve(detected.size());
    for (const auto& d : detected.blocks()) {
        std::size_t best = 0, best_overlap = 0;
        for (std::size_t k = 0; k < truth.size(); ++k) {
            const auto lo = std::max(d.lo, truth[k].lo), hi = std::min(d.hi, truth[k].hi);
            const std::size_t overlap = hi >= lo ? hi - lo + 1 : 0;
            if (overlap > best_overlap) {
                best_overlap = overlap;
                best = k;
            }
        }
        out.push_back(best);
    }
    return out;
}

std::vector<std::optional<double>> pve_ratio(std::span<const double> estimated, std::span<const double> truth,
                                             const std::vector<std::size_t>& alignment) {
    if (estimated.size() != alignment.size()) throw InvalidArgument("alignment does not match the estimated blocks");
    std::vector<double> sum(truth.size(), 0.0);
    std::vector<bool> hit(truth.size(), false);
    for (std::size_t d = 0; d < estimated.size(); ++d) {
        if (alignment[d] >= truth.size()) throw InvalidArgument("alignment refers to a missing true block");
        sum[alignment[d]] += estimated[d];
        hit[alignment[d]] = true;
    }
    std::vector<std::optional<double>> out(truth.size());
    for (std::size_t k = 0; k < truth.size(); ++k)
        if (hit[k] && truth[k] > 0.0) out[k] = sum[k] / truth[k];
    return out;
}

std::vector<double> true_pve_per_block(const SimDesign& design) {
    const Vector lambda = component_variances(design);
    const auto blocks = component_blocks(design);
    std::vector<double> out(kSupports.size(), 0.0);
    for (std::size_t k = 0; k < leading_count(design); ++k) out[blocks[k]] += lambda(static_cast<Eigen::Index>(k));
    const double total = lambda.sum();
    for (auto& v : out) v /= total;
    return out;
}

std::string method_label(const StudyConfig& cfg) {
    return cfg.method == Method::LFpca ? std::string("lfpca") : fmt::format("fpca-tau:{:g}", cfg.tau);
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t rep) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(rep) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Replication fit_replication(const SimDesign& design, std::size_t n, std::size_t rep, const StudyConfig& cfg) {
    if (cfg.method == Method::FpcaTau && !(cfg.tau > 0.0)) throw InvalidArgument("fpca-tau needs a positive tau");

    SimDesign d = design;
    d.seed = replication_seed(design.seed, rep);
    const Grid grid = make_uniform_grid(cfg.grid_points, 0.0, 1.0);
    const Matrix truth_basis = build_basis(d, grid);
    const auto truth_blocks = component_blocks(d);
    const auto lead = leading_count(d);
    const auto true_pve = true_pve_per_block(d);

    Replication out;
    auto& rec = out.record;
    rec.rep = rep;
    rec.method = method_label(cfg);
    rec.design = to_string(d.name);
    rec.n = n;
    rec.seed = d.seed;

    const auto sample = generate(d, n, grid);
    const auto& truth = sample.truth;
    const auto centered = center(sample.noisy);
    const auto denoised = denoise_kl(centered, cfg.denoise_pve);
    const auto den_cov = empirical_covariance(denoised.curves);

    std::vector<std::vector<std::size_t>> est_support(kSupports.size());
    auto add_range = [](std::vector<std::size_t>& v, IndexInterval b) {
        for (std::size_t i = b.lo; i <= b.hi; ++i) v.push_back(i);
    };

    if (cfg.method == Method::LFpca) {
        const auto detection = detect_blocks(empirical_covariance(centered), cfg.detection);
        auto sys = localized_fpca(den_cov, detection.partition, cfg.m, denoised.retained);
        const auto match = match_components(sys, truth_basis);
        rec.matched_truth = match.truth_of;
        for (std::size_t l = 0; l < sys.components.size(); ++l) {
            const auto t = match.truth_of[l];
            if (t && *t < lead) add_range(est_support[truth_blocks[*t]], sys.partition[sys.components[l].block_id]);
        }
        rec.pve_ratio = pve_ratio(sys.pve_per_block, true_pve, align_blocks(sys.partition, truth));
        rec.n_blocks_detected = sys.partition.size();
        rec.detected = sys.partition.blocks();
        out.system = std::move(sys);
    } else {
        auto sys = standard_fpca(den_cov, cfg.m);
        const auto match = match_components(sys, truth_basis);
        rec.matched_truth = match.truth_of;
        std::vector<double> est_pve(kSupports.size(), 0.0);
        std::vector<bool> hit(kSupports.size(), false);
        for (std::size_t l = 0; l < sys.components.size(); ++l) {
            const auto t = match.truth_of[l];
            if (!t || *t >= lead) continue;
            const auto k = truth_blocks[*t];
            const auto& f = sys.components[l].eigenfunction;
            for (Eigen::Index p = 0; p < f.size(); ++p)
                if (std::abs(f(p)) > cfg.tau) est_support[k].push_back(static_cast<std::size_t>(p));
            est_pve[k] += sys.pve_per_component[l];
            hit[k] = true;
        }
        rec.pve_ratio.resize(kSupports.size());
        for (std::size_t k = 0; k < kSupports.size(); ++k)
            if (hit[k]) rec.pve_ratio[k] = est_pve[k] / true_pve[k];
        rec.n_blocks_detected = 1;
        rec.detected = sys.partition.blocks();
        out.system = std::move(sys);
    }

    for (std::size_t k = 0; k < kSupports.size(); ++k) {
        std::vector<std::size_t> s(truth[k].size());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = truth[k].lo + i;
        auto& est = est_support[k];
        std::sort(est.begin(), est.end());
        est.erase(std::unique(est.begin(), est.end()), est.end());
        const auto score = support_metrics(est, s, grid.size());
        rec.specificity.push_back(score.specificity);
        rec.precision.push_back(score.precision);
    }
    return out;
}

std::vector<MetricsRecord> run_study(const SimDesign& design, std::size_t n, std::size_t reps,
                                     const StudyConfig& cfg) {
    if (reps < 1) throw InvalidArgument("reps must be at least 1");
    if (n < 2) throw InvalidArgument("n must be at least 2");
    std::vector<MetricsRecord> records(reps);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t r = 0; r < reps; ++r) {
        try {
            records[r] = fit_replication(design, n, r, cfg).record;
        } catch (const std::exception& e) {
            auto& rec = records[r];
            rec.rep = r;
            rec.method = method_label(cfg);
            rec.design = to_string(design.name);
            rec.n = n;
            rec.seed = replication_seed(design.seed, r);
            rec.error = e.what();
        }
    }
    return records;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records) {
    out << "rep,method,block,specificity,precision,pve_ratio,n_blocks_detected,design,n\n";
    for (const auto& r : records) {
        for (std::size_t k = 0; k < kSupports.size(); ++k) {
            const bool ok = !r.error;
            out << r.rep + 1 << ',' << r.method << ',' << k + 1 << ','
                << (ok ? na_or(r.specificity.at(k)) : "NA") << ','
                << (ok ? na_or(r.precision.at(k)) : "NA") << ','
                << (ok ? na_or(r.pve_ratio.at(k)) : "NA") << ','
                << (ok ? std::to_string(r.n_blocks_detected) : "NA") << ',' << r.design << ',' << r.n << '\n';
        }
    }
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InvalidArgument("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

nlohmann::json summarize(const std::vector<MetricsRecord>& records) {
    auto stats = [](const std::vector<double>& v) {
        if (v.empty()) return nlohmann::json{{"count", 0}, {"median", nullptr}, {"q1", nullptr}, {"q3", nullptr}};
        return nlohmann::json{
            {"count", v.size()}, {"median", quantile(v, 0.5)}, {"q1", quantile(v, 0.25)}, {"q3", quantile(v, 0.75)}};
    };

    nlohmann::json j;
    std::size_t failures = 0;
    std::vector<double> nblocks;
    nlohmann::json errors = nlohmann::json::array();
    for (const auto& r : records) {
        if (r.error) {
            ++failures;
            errors.push_back({{"rep", r.rep + 1}, {"error", *r.error}});
        } else {
            nblocks.push_back(static_cast<double>(r.n_blocks_detected));
        }
    }
    if (!records.empty()) {
        j["design"] = records.front().design;
        j["n"] = records.front().n;
        j["method"] = records.front().method;
    }
    j["reps"] = records.size();
    j["failures"] = failures;
    j["errors"] = errors;
    j["n_blocks_detected"] = stats(nblocks);

    nlohmann::json blocks = nlohmann::json::array();
    for (std::size_t k = 0; k < kSupports.size(); ++k) {
        std::vector<double> spec, prec, ratio;
        for (const auto& r : records) {
            if (r.error) continue;
            spec.push_back(r.specificity.at(k));
            prec.push_back(r.precision.at(k));
            if (r.pve_ratio.at(k)) ratio.push_back(*r.pve_ratio.at(k));
        }
        blocks.push_back({{"block", k + 1}, {"specificity", stats(spec)}, {"precision", stats(prec)},
                          {"pve_ratio", stats(ratio)}});
    }
    j["blocks"] = blocks;
    return j;
}

} // namespace lfpca::sim
