#include "lfpca/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace lfpca {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Io: return "io-error";
    case ErrorKind::Format: return "format-error";
    case ErrorKind::State: return "state-error";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::Numeric: return "numeric-error";
    }
    return "error";
}

Grid::Grid(Vector points, Vector weights) : points_(std::move(points)), weights_(std::move(weights)) {
    const auto p = points_.size();
    if (p < 2) throw InvalidArgument("grid needs at least 2 points");
    if (weights_.size() != p) throw InvalidArgument("grid weights and points differ in length");
    for (Eigen::Index i = 0; i < p; ++i) {
        if (!std::isfinite(points_(i))) throw InvalidArgument(fmt::format("grid point {} is not finite", i));
        if (i > 0 && !(points_(i) > points_(i - 1)))
            throw InvalidArgument(fmt::format("grid points not strictly increasing at index {}", i));
        if (!(weights_(i) > 0.0)) throw InvalidArgument(fmt::format("grid weight {} is not positive", i));
    }
    const double len = length();
    if (std::abs(weights_.sum() - len) > 1e-10 * len)
        throw InvalidArgument("grid weights do not sum to the domain length");
}

Grid Grid::trapezoid(Vector points) {
    const auto p = points.size();
    if (p < 2) throw InvalidArgument("grid needs at least 2 points");
    Vector w = Vector::Zero(p);
    for (Eigen::Index i = 0; i + 1 < p; ++i) {
        const double h = points(i + 1) - points(i);
        if (!(h > 0.0)) throw InvalidArgument(fmt::format("grid points not strictly increasing at index {}", i + 1));
        w(i) += 0.5 * h;
        w(i + 1) += 0.5 * h;
    }
    return Grid(std::move(points), std::move(w));
}

double Grid::inner(const Vector& f, const Vector& g) const {
    return (weights_.array() * f.array() * g.array()).sum();
}

double Grid::norm(const Vector& f) const { return std::sqrt(inner(f, f)); }

bool Grid::operator==(const Grid& other) const {
    return points_.size() == other.points_.size() && points_ == other.points_ && weights_ == other.weights_;
}

Grid make_uniform_grid(std::size_t p, double a, double b) {
    if (p < 2) throw InvalidArgument("uniform grid needs p >= 2");
    if (!(b > a)) throw InvalidArgument("uniform grid needs b > a");
    Vector s(static_cast<Eigen::Index>(p));
    const double h = (b - a) / static_cast<double>(p - 1);
    for (std::size_t i = 0; i < p; ++i) s(static_cast<Eigen::Index>(i)) = a + h * static_cast<double>(i);
    s(static_cast<Eigen::Index>(p - 1)) = b;
    Vector w = Vector::Constant(static_cast<Eigen::Index>(p), h);
    w(0) = w(static_cast<Eigen::Index>(p - 1)) = 0.5 * h;
    return Grid(std::move(s), std::move(w));
}

CurveSet::CurveSet(Grid grid, Matrix values, bool centered)
    : grid_(std::move(grid)), values_(std::move(values)), centered_(centered) {
    if (static_cast<std::size_t>(values_.cols()) != grid_.size())
        throw InvalidArgument(fmt::format("curves have {} columns but the grid has {} points", values_.cols(),
                                          grid_.size()));
}

CovMatrix::CovMatrix(Grid grid, Matrix entries, std::size_t sample_size)
    : grid_(std::move(grid)), entries_(std::move(entries)), sample_size_(sample_size) {
    const auto p = static_cast<Eigen::Index>(grid_.size());
    if (entries_.rows() != p || entries_.cols() != p)
        throw InvalidArgument(fmt::format("covariance is {}x{} but the grid has {} points", entries_.rows(),
                                          entries_.cols(), p));
    double scale = 0.0, asym = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) {
            const double v = entries_(i, j);
            if (!std::isfinite(v)) continue;   // reported by the eigensolver path
            scale = std::max(scale, std::abs(v));
            const double t = entries_(j, i);
            if (std::isfinite(t)) asym = std::max(asym, std::abs(v - t));
        }
        if (entries_(j, j) < 0.0) throw InvalidArgument(fmt::format("negative variance at grid index {}", j));
    }
    if (asym > 1e-12 * scale) throw InvalidArgument("covariance matrix is not symmetric");
}

BlockPartition::BlockPartition(std::vector<IndexInterval> blocks, std::size_t grid_size)
    : blocks_(std::move(blocks)), grid_size_(grid_size) {
    if (blocks_.empty()) throw InvalidArgument("partition has no blocks");
    std::size_t next = 0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        const auto& b = blocks_[k];
        if (b.lo != next || b.hi < b.lo)
            throw InvalidArgument(fmt::format("block {} [{}, {}] breaks contiguity", k, b.lo, b.hi));
        next = b.hi + 1;
    }
    if (next != grid_size_) throw InvalidArgument("partition does not cover the grid");
}

BlockPartition BlockPartition::single(std::size_t grid_size) {
    if (grid_size == 0) throw InvalidArgument("empty grid");
    return BlockPartition({{0, grid_size - 1}}, grid_size);
}

BlockPartition BlockPartition::from_ends(const std::vector<std::size_t>& block_ends, std::size_t grid_size) {
    std::vector<IndexInterval> blocks;
    std::size_t lo = 0;
    for (auto hi : block_ends) {
        blocks.push_back({lo, hi});
        lo = hi + 1;
    }
    return BlockPartition(std::move(blocks), grid_size);
}

std::size_t BlockPartition::block_of(std::size_t index) const {
    auto it = std::upper_bound(blocks_.begin(), blocks_.end(), index,
                               [](std::size_t i, const IndexInterval& b) { return i < b.lo; });
    if (it == blocks_.begin() || index >= grid_size_) throw InvalidArgument("index outside the grid");
    return static_cast<std::size_t>(std::distance(blocks_.begin(), it) - 1);
}

} // namespace lfpca
