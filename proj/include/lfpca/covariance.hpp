#pragma once

#include <cstddef>
#include <span>

#include "lfpca/model.hpp"

namespace lfpca {

/// Relative floor below which eigenvalues count as zero.
inline constexpr double kEigenvalueFloor = 1e-12;

/// (1 / (N - 1)) * X^T X for centered curves. Throws StateError on uncentered
/// input and InvalidArgument when N < 2.
CovMatrix empirical_covariance(const CurveSet& curves);

/// Eigenpairs of the covariance operator discretized with quadrature weights.
///
/// Solves the symmetric problem W^{1/2} G W^{1/2} v = lambda v and maps back with
/// psi = W^{-1/2} v, so columns of `functions` are orthonormal under the grid's
/// quadrature inner product. Sorted by eigenvalue descending; each function is
/// signed so that its largest-magnitude entry (lowest index on ties) is positive.
struct QuadratureEigen {
    Vector values;
    Matrix functions;
};

/// Full spectrum of `entries` under the quadrature `weights`. Throws
/// NumericError on non-finite input.
QuadratureEigen quadrature_eigen(const Matrix& entries, const Vector& weights);

/// Flips v so that its largest-magnitude entry is positive (lowest index wins ties).
void normalize_sign(Eigen::Ref<Vector> v);

/// Smallest L whose leading eigenvalues explain at least `pve` of the total.
std::size_t choose_truncation(std::span<const double> eigenvalues, double pve);

struct Denoised {
    CurveSet curves;
    std::size_t retained = 0;   // truncation level L
    Vector eigenvalues;         // full (floored) spectrum of the input covariance
};

/// Projects every curve onto the leading L eigenfunctions of its empirical
/// covariance, L = choose_truncation(spectrum, pve). Grid unchanged.
Denoised denoise_kl(const CurveSet& curves, double pve);

} // namespace lfpca
