#pragma once

#include <cstddef>
#include <vector>

#include "lfpca/model.hpp"

namespace lfpca {

/// Eigenpairs of the covariance restricted to one block, under the block's
/// quadrature weights. At most `j_max` components above the relative floor are
/// returned; eigenfunctions are zero-padded to the full grid, so they are
/// exactly zero outside the block. Throws NumericError on non-finite entries.
std::vector<EigenComponent> eigendecompose_block(const CovMatrix& g, IndexInterval block, std::size_t j_max,
                                                 std::size_t block_id = 0);

/// Localized FPCA on a given partition.
///
/// Every block is decomposed independently (in parallel), the leading `j_max`
/// components of each block are merged and sorted by eigenvalue, and the top
/// `m` are kept. `total_variance` sums every positive eigenvalue of every
/// block, retained or not, so `pve_per_block` always closes to 1.
/// Requesting more components than available clamps `m` and sets `clamped`.
LocalizedEigenSystem localized_fpca(const CovMatrix& g, const BlockPartition& partition, std::size_t m,
                                    std::size_t j_max);

/// Ordinary (non-localized) FPCA: the single-block special case.
LocalizedEigenSystem standard_fpca(const CovMatrix& g, std::size_t m);

struct UnionCheck {
    /// Max |sorted per-block eigenvalues - sorted dense eigenvalues|, or the
    /// largest off-block magnitude when `precondition_violated`.
    double value = 0.0;
    bool precondition_violated = false;
};

/// Compares the union of per-block spectra with the spectrum of the full
/// matrix. Requires off-block entries below 1e-10.
UnionCheck eigen_union_check(const CovMatrix& g, const BlockPartition& partition);

/// values(n, l) = <x_n, psi_l>. Throws InvalidArgument on a grid mismatch and
/// StateError on uncentered curves.
ScoreMatrix compute_scores(const CurveSet& curves, const LocalizedEigenSystem& sys);

/// x_n = sum_l scores(n, l) psi_l.
CurveSet reconstruct(const ScoreMatrix& scores, const LocalizedEigenSystem& sys);

/// P x M matrix whose columns are the system's eigenfunctions.
Matrix eigenfunction_matrix(const LocalizedEigenSystem& sys);

} // namespace lfpca
