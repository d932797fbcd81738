#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lfpca/errors.hpp"

namespace lfpca {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr const char* kVersion = "0.1.0";

/// Ordered sample points of the domain together with trapezoid weights.
///
/// All inner products in the library are the discrete quadrature product
/// <f, g> = sum_p w_p f(s_p) g(s_p) on this grid.
class Grid {
public:
    /// Validates: P >= 2, strictly increasing points, positive weights that
    /// sum to the domain length within 1e-10 relative.
    Grid(Vector points, Vector weights);

    /// Grid on arbitrary increasing points with trapezoid weights.
    static Grid trapezoid(Vector points);

    const Vector& points() const noexcept { return points_; }
    const Vector& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(points_.size()); }
    double front() const { return points_(0); }
    double back() const { return points_(points_.size() - 1); }
    double length() const { return back() - front(); }

    double inner(const Vector& f, const Vector& g) const;
    double norm(const Vector& f) const;

    bool operator==(const Grid& other) const;

private:
    Vector points_;
    Vector weights_;
};

/// p equidistant points on [a, b] with trapezoid weights.
Grid make_uniform_grid(std::size_t p, double a, double b);

/// N curves observed on a shared grid, one row per curve.
class CurveSet {
public:
    CurveSet(Grid grid, Matrix values, bool centered = false);

    const Grid& grid() const noexcept { return grid_; }
    const Matrix& values() const noexcept { return values_; }
    bool centered() const noexcept { return centered_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }

private:
    Grid grid_;
    Matrix values_;
    bool centered_;
};

/// Symmetric P x P covariance on a grid. `sample_size` is the number of curves
/// the estimate came from, or 0 for a population (exact) covariance.
class CovMatrix {
public:
    CovMatrix(Grid grid, Matrix entries, std::size_t sample_size = 0);

    const Grid& grid() const noexcept { return grid_; }
    const Matrix& entries() const noexcept { return entries_; }
    std::size_t sample_size() const noexcept { return sample_size_; }
    std::size_t size() const noexcept { return grid_.size(); }

private:
    Grid grid_;
    Matrix entries_;
    std::size_t sample_size_;
};

/// Closed index interval [lo, hi] on the grid.
struct IndexInterval {
    std::size_t lo = 0;
    std::size_t hi = 0;

    std::size_t size() const noexcept { return hi - lo + 1; }
    bool contains(std::size_t i) const noexcept { return lo <= i && i <= hi; }
    bool operator==(const IndexInterval&) const = default;
};

/// Ordered disjoint intervals covering {0, ..., P-1}.
class BlockPartition {
public:
    BlockPartition(std::vector<IndexInterval> blocks, std::size_t grid_size);

    static BlockPartition single(std::size_t grid_size);
    /// Builds the partition whose blocks end at `block_ends` (last must be P-1).
    static BlockPartition from_ends(const std::vector<std::size_t>& block_ends, std::size_t grid_size);

    const std::vector<IndexInterval>& blocks() const noexcept { return blocks_; }
    const IndexInterval& operator[](std::size_t k) const { return blocks_.at(k); }
    std::size_t size() const noexcept { return blocks_.size(); }
    std::size_t grid_size() const noexcept { return grid_size_; }
    std::size_t block_of(std::size_t index) const;

    bool operator==(const BlockPartition&) const = default;

private:
    std::vector<IndexInterval> blocks_;
    std::size_t grid_size_;
};

struct EigenComponent {
    double eigenvalue = 0.0;
    Vector eigenfunction;          // length P, exactly zero outside its block
    std::size_t block_id = 0;
    std::size_t within_block_rank = 0;
    bool degenerate = false;       // eigenvalue gap to a neighbour below 1e-10 relative
};

struct LocalizedEigenSystem {
    Grid grid;
    BlockPartition partition;
    std::vector<EigenComponent> components;   // eigenvalue descending
    double total_variance = 0.0;
    std::vector<double> pve_per_component;
    std::vector<double> pve_per_block;
    std::size_t requested_components = 0;
    bool clamped = false;                     // requested more than available
};

/// FPC scores, one row per curve and one column per retained component.
struct ScoreMatrix {
    Matrix values;
    bool centered = true;
};

} // namespace lfpca
