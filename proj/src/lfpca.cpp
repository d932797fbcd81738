#include "lfpca/lfpca.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "lfpca/covariance.hpp"
#include "lfpca/kernels.hpp"

namespace lfpca {

namespace {

struct BlockSpectrum {
    std::vector<EigenComponent> components;   // leading j_max above the floor
    double positive_mass = 0.0;               // sum of all positive eigenvalues above the floor
    double largest = 0.0;
};

BlockSpectrum decompose(const CovMatrix& g, IndexInterval block, std::size_t j_max, std::size_t block_id) {
    const auto p = static_cast<Eigen::Index>(g.size());
    if (block.hi < block.lo || block.hi >= g.size()) throw InvalidArgument("block outside the grid");
    if (j_max < 1) throw InvalidArgument("j_max must be at least 1");

    const auto lo = static_cast<Eigen::Index>(block.lo);
    const auto len = static_cast<Eigen::Index>(block.size());
    const auto eig = quadrature_eigen(g.entries().block(lo, lo, len, len), g.grid().weights().segment(lo, len));

    BlockSpectrum out;
    out.largest = std::max(eig.values(0), 0.0);
    const double floor = kEigenvalueFloor * out.largest;
    for (Eigen::Index j = 0; j < len; ++j) {
        const double lambda = eig.values(j);
        if (!(lambda > floor) || lambda <= 0.0) break;
        out.positive_mass += lambda;
        if (static_cast<std::size_t>(j) < j_max) {
            EigenComponent c;
            c.eigenvalue = lambda;
            c.eigenfunction = Vector::Zero(p);
            c.eigenfunction.segment(lo, len) = eig.functions.col(j);
            c.block_id = block_id;
            c.within_block_rank = static_cast<std::size_t>(j);
            out.components.push_back(std::move(c));
        }
    }
    const double gap_tol = 1e-10 * out.largest;
    for (std::size_t j = 0; j + 1 < out.components.size(); ++j) {
        if (out.components[j].eigenvalue - out.components[j + 1].eigenvalue < gap_tol) {
            out.components[j].degenerate = true;
            out.components[j + 1].degenerate = true;
        }
    }
    return out;
}

} // namespace

std::vector<EigenComponent> eigendecompose_block(const CovMatrix& g, IndexInterval block, std::size_t j_max,
                                                 std::size_t block_id) {
    return decompose(g, block, j_max, block_id).components;
}

LocalizedEigenSystem localized_fpca(const CovMatrix& g, const BlockPartition& partition, std::size_t m,
                                    std::size_t j_max) {
    if (m < 1) throw InvalidArgument("m must be at least 1");
    if (partition.grid_size() != g.size()) throw InvalidArgument("partition does not match the covariance grid");

    const auto k_blocks = partition.size();
    std::vector<BlockSpectrum> spectra(k_blocks);
    std::vector<std::string> failures(k_blocks);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t k = 0; k < k_blocks; ++k) {
        try {
            spectra[k] = decompose(g, partition[k], j_max, k);
        } catch (const std::exception& e) {
            failures[k] = e.what();
        }
    }
    for (std::size_t k = 0; k < k_blocks; ++k)
        if (!failures[k].empty()) throw NumericError(fmt::format("block {}: {}", k + 1, failures[k]));

    double global_top = 0.0;
    for (const auto& s : spectra) global_top = std::max(global_top, s.largest);
    if (!(global_top > 0.0)) throw InvalidArgument("covariance has no positive eigenvalue");
    const double floor = kEigenvalueFloor * global_top;

    LocalizedEigenSystem sys{g.grid(), partition, {}, 0.0, {}, std::vector<double>(k_blocks, 0.0), m, false};
    std::vector<double> block_mass(k_blocks, 0.0);
    for (std::size_t k = 0; k < k_blocks; ++k) {
        for (auto& c : spectra[k].components)
            if (c.eigenvalue > floor) sys.components.push_back(std::move(c));
        block_mass[k] = spectra[k].positive_mass;
        sys.total_variance += block_mass[k];
    }

    std::stable_sort(sys.components.begin(), sys.components.end(),
                     [](const EigenComponent& a, const EigenComponent& b) { return a.eigenvalue > b.eigenvalue; });
    if (sys.components.size() < m) {
        sys.clamped = true;
    } else {
        sys.components.resize(m);
    }

    for (const auto& c : sys.components) sys.pve_per_component.push_back(c.eigenvalue / sys.total_variance);
    for (std::size_t k = 0; k < k_blocks; ++k) sys.pve_per_block[k] = block_mass[k] / sys.total_variance;
    return sys;
}

LocalizedEigenSystem standard_fpca(const CovMatrix& g, std::size_t m) {
    return localized_fpca(g, BlockPartition::single(g.size()), m, m);
}

UnionCheck eigen_union_check(const CovMatrix& g, const BlockPartition& partition) {
    if (partition.grid_size() != g.size()) throw InvalidArgument("partition does not match the covariance grid");
    const auto& e = g.entries();
    double off_block = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const auto kj = partition.block_of(j);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (partition.block_of(i) != kj)
                off_block = std::max(off_block, std::abs(e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
    if (off_block >= 1e-10) return {off_block, true};

    const auto& w = g.grid().weights();
    std::vector<double> from_blocks;
    from_blocks.reserve(g.size());
    for (const auto& b : partition.blocks()) {
        const auto lo = static_cast<Eigen::Index>(b.lo);
        const auto len = static_cast<Eigen::Index>(b.size());
        const auto eig = quadrature_eigen(e.block(lo, lo, len, len), w.segment(lo, len));
        from_blocks.insert(from_blocks.end(), eig.values.data(), eig.values.data() + len);
    }
    const auto dense = quadrature_eigen(e, w).values;
    std::sort(from_blocks.begin(), from_blocks.end(), std::greater<>());

    double worst = 0.0;
    for (std::size_t i = 0; i < from_blocks.size(); ++i)
        worst = std::max(worst, std::abs(from_blocks[i] - dense(static_cast<Eigen::Index>(i))));
    return {worst, false};
}

Matrix eigenfunction_matrix(const LocalizedEigenSystem& sys) {
    Matrix psi(static_cast<Eigen::Index>(sys.grid.size()), static_cast<Eigen::Index>(sys.components.size()));
    for (std::size_t l = 0; l < sys.components.size(); ++l)
        psi.col(static_cast<Eigen::Index>(l)) = sys.components[l].eigenfunction;
    return psi;
}

ScoreMatrix compute_scores(const CurveSet& curves, const LocalizedEigenSystem& sys) {
    if (!(curves.grid() == sys.grid)) throw InvalidArgument("curves and eigensystem live on different grids");
    if (!curves.centered()) throw StateError("scores require centered curves");
    return ScoreMatrix{
        kernels::omp::weighted_projection(curves.values(), curves.grid().weights(), eigenfunction_matrix(sys)),
        true};
}

CurveSet reconstruct(const ScoreMatrix& scores, const LocalizedEigenSystem& sys) {
    if (static_cast<std::size_t>(scores.values.cols()) != sys.components.size())
        throw InvalidArgument(fmt::format("{} score columns for {} components", scores.values.cols(),
                                          sys.components.size()));
    return CurveSet(sys.grid, kernels::omp::expand(scores.values, eigenfunction_matrix(sys)), scores.centered);
}

} // namespace lfpca
