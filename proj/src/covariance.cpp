#include "lfpca/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "lfpca/kernels.hpp"

namespace lfpca {

CovMatrix empirical_covariance(const CurveSet& curves) {
    if (!curves.centered()) throw StateError("empirical covariance requires centered curves");
    const auto n = curves.size();
    if (n < 2) throw InvalidArgument("empirical covariance requires at least 2 curves");
    Matrix g = kernels::omp::cross_product(curves.values(), 1.0 / static_cast<double>(n - 1));
    return CovMatrix(curves.grid(), std::move(g), n);
}

void normalize_sign(Eigen::Ref<Vector> v) {
    Eigen::Index best = 0;
    double mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > mag) {
            mag = std::abs(v(i));
            best = i;
        }
    }
    if (v.size() > 0 && v(best) < 0.0) v = -v;
}

QuadratureEigen quadrature_eigen(const Matrix& entries, const Vector& weights) {
    const auto p = entries.rows();
    if (entries.cols() != p || weights.size() != p) throw InvalidArgument("eigenproblem dimensions disagree");
    if (!entries.allFinite()) throw NumericError("covariance contains non-finite entries");

    const Vector sw = weights.array().sqrt();
    Matrix m = sw.asDiagonal() * entries * sw.asDiagonal();
    m = 0.5 * (m + m.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");

    QuadratureEigen out;
    out.values = solver.eigenvalues().reverse();
    out.functions = solver.eigenvectors().rowwise().reverse();
    out.functions = sw.cwiseInverse().asDiagonal() * out.functions;
    for (Eigen::Index j = 0; j < p; ++j) normalize_sign(out.functions.col(j));
    return out;
}

std::size_t choose_truncation(std::span<const double> eigenvalues, double pve) {
    if (!(pve > 0.0 && pve <= 1.0)) throw InvalidArgument(fmt::format("pve {} outside (0, 1]", pve));
    double total = 0.0;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        if (i > 0 && eigenvalues[i] > eigenvalues[i - 1])
            throw InvalidArgument("eigenvalues must be sorted in descending order");
        if (eigenvalues[i] > 0.0) total += eigenvalues[i];
    }
    if (!(total > 0.0)) throw InvalidArgument("no positive eigenvalue to truncate");

    double cumulative = 0.0;
    std::size_t positive = 0;
    for (std::size_t l = 0; l < eigenvalues.size() && eigenvalues[l] > 0.0; ++l) {
        cumulative += eigenvalues[l];
        positive = l + 1;
        if (cumulative >= pve * total * (1.0 - 1e-12)) return l + 1;
    }
    return positive;
}

Denoised denoise_kl(const CurveSet& curves, double pve) {
    if (!(pve > 0.0 && pve <= 1.0)) throw InvalidArgument(fmt::format("pve {} outside (0, 1]", pve));
    const auto cov = empirical_covariance(curves);
    auto eig = quadrature_eigen(cov.entries(), curves.grid().weights());

    const double top = std::max(eig.values(0), 0.0);
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
        if (eig.values(i) < kEigenvalueFloor * top) eig.values(i) = 0.0;

    const std::vector<double> spectrum(eig.values.data(), eig.values.data() + eig.values.size());
    const auto retained = choose_truncation(spectrum, pve);
    const Matrix basis = eig.functions.leftCols(static_cast<Eigen::Index>(retained));

    const Matrix scores = kernels::omp::weighted_projection(curves.values(), curves.grid().weights(), basis);
    Matrix projected = kernels::omp::expand(scores, basis);
    return Denoised{CurveSet(curves.grid(), std::move(projected), true), retained, std::move(eig.values)};
}

} // namespace lfpca
