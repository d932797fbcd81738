#include "lfpca/kernels.hpp"

#include <cmath>

#include <omp.h>

namespace lfpca::kernels {

namespace {

inline double column_dot(const Matrix& x, Eigen::Index i, Eigen::Index j) {
    const double* a = x.col(i).data();
    const double* b = x.col(j).data();
    double acc = 0.0;
    for (Eigen::Index n = 0; n < x.rows(); ++n) acc += a[n] * b[n];
    return acc;
}

inline void projection_column(const Matrix& x, const Vector& w, const Matrix& basis, Matrix& out, Eigen::Index m) {
    double* o = out.col(m).data();
    for (Eigen::Index p = 0; p < x.cols(); ++p) {
        const double c = w(p) * basis(p, m);
        if (c == 0.0) continue;
        const double* xp = x.col(p).data();
        for (Eigen::Index n = 0; n < x.rows(); ++n) o[n] += xp[n] * c;
    }
}

inline void expand_column(const Matrix& scores, const Matrix& basis, Matrix& out, Eigen::Index p) {
    double* o = out.col(p).data();
    for (Eigen::Index m = 0; m < scores.cols(); ++m) {
        const double c = basis(p, m);
        if (c == 0.0) continue;
        const double* sm = scores.col(m).data();
        for (Eigen::Index n = 0; n < scores.rows(); ++n) o[n] += sm[n] * c;
    }
}

inline std::size_t reach_of(const Matrix& r, Eigen::Index i, double tau) {
    // r is symmetric: scan column i (contiguous) from the far end.
    const double* col = r.col(i).data();
    for (Eigen::Index j = r.rows() - 1; j > i; --j)
        if (std::abs(col[j]) > tau) return static_cast<std::size_t>(j);
    return static_cast<std::size_t>(i);
}

} // namespace

namespace serial {

Matrix cross_product(const Matrix& x, double scale) {
    const Eigen::Index p = x.cols();
    Matrix out(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double v = scale * column_dot(x, i, j);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

Matrix weighted_projection(const Matrix& x, const Vector& w, const Matrix& basis) {
    Matrix out = Matrix::Zero(x.rows(), basis.cols());
    for (Eigen::Index m = 0; m < basis.cols(); ++m) projection_column(x, w, basis, out, m);
    return out;
}

Matrix expand(const Matrix& scores, const Matrix& basis) {
    Matrix out = Matrix::Zero(scores.rows(), basis.rows());
    for (Eigen::Index p = 0; p < basis.rows(); ++p) expand_column(scores, basis, out, p);
    return out;
}

std::vector<std::size_t> correlation_reach(const Matrix& r, double tau) {
    std::vector<std::size_t> reach(static_cast<std::size_t>(r.rows()));
    for (Eigen::Index i = 0; i < r.rows(); ++i) reach[static_cast<std::size_t>(i)] = reach_of(r, i, tau);
    return reach;
}

} // namespace serial

namespace omp {

Matrix cross_product(const Matrix& x, double scale) {
    const Eigen::Index p = x.cols();
    Matrix out(p, p);
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double v = scale * column_dot(x, i, j);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

Matrix weighted_projection(const Matrix& x, const Vector& w, const Matrix& basis) {
    Matrix out = Matrix::Zero(x.rows(), basis.cols());
#pragma omp parallel for schedule(static)
    for (Eigen::Index m = 0; m < basis.cols(); ++m) projection_column(x, w, basis, out, m);
    return out;
}

Matrix expand(const Matrix& scores, const Matrix& basis) {
    Matrix out = Matrix::Zero(scores.rows(), basis.rows());
#pragma omp parallel for schedule(static)
    for (Eigen::Index p = 0; p < basis.rows(); ++p) expand_column(scores, basis, out, p);
    return out;
}

std::vector<std::size_t> correlation_reach(const Matrix& r, double tau) {
    std::vector<std::size_t> reach(static_cast<std::size_t>(r.rows()));
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < r.rows(); ++i) reach[static_cast<std::size_t>(i)] = reach_of(r, i, tau);
    return reach;
}

} // namespace omp

void set_max_threads(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

int max_threads() { return omp_get_max_threads(); }

} // namespace lfpca::kernels
