#pragma once

// Data-parallel inner loops of the pipeline.
//
// Every kernel exists twice: `serial` is the reference implementation kept for
// testing and benchmarking, `omp` is what the library calls. Both variants
// accumulate each output element in the same order, so their results are
// bitwise identical regardless of the thread count.

#include <cstddef>
#include <vector>

#include "lfpca/model.hpp"

namespace lfpca::kernels {

namespace serial {

/// scale * x^T x for an N x P matrix; the result is exactly symmetric.
Matrix cross_product(const Matrix& x, double scale);

/// x * diag(w) * basis, i.e. quadrature inner products of each row of x
/// (N x P) with each column of basis (P x M).
Matrix weighted_projection(const Matrix& x, const Vector& w, const Matrix& basis);

/// scores * basis^T: expands N x M coefficients into N x P curves.
Matrix expand(const Matrix& scores, const Matrix& basis);

/// For each row i of a symmetric matrix, the largest j >= i with |r(i, j)| > tau
/// (or i itself when there is none).
std::vector<std::size_t> correlation_reach(const Matrix& r, double tau);

} // namespace serial

namespace omp {

Matrix cross_product(const Matrix& x, double scale);
Matrix weighted_projection(const Matrix& x, const Vector& w, const Matrix& basis);
Matrix expand(const Matrix& scores, const Matrix& basis);
std::vector<std::size_t> correlation_reach(const Matrix& r, double tau);

} // namespace omp

/// Caps the worker count used by the omp kernels and the simulation harness.
void set_max_threads(int threads);
int max_threads();

} // namespace lfpca::kernels
