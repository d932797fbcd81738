#pragma once

#include <cstddef>
#include <vector>

#include "lfpca/model.hpp"

namespace lfpca {

/// Clamped B-spline basis of a given degree on a non-decreasing knot vector.
/// Basis functions are numbered 1..(knots - degree - 1); the last one equals 1
/// at the right end of the knot span, and every function is 0 outside it.
class BSplineBasis {
public:
    BSplineBasis(std::vector<double> knots, int degree);

    std::size_t count() const noexcept { return knots_.size() - static_cast<std::size_t>(degree_) - 1; }
    const std::vector<double>& knots() const noexcept { return knots_; }

    /// B_index(x), index 1-based.
    double value(std::size_t index, double x) const;
    /// B_index evaluated on every point of `points`.
    Vector evaluate(std::size_t index, const Vector& points) const;

private:
    std::size_t span(double x) const;

    std::vector<double> knots_;
    int degree_;
};

/// Knot vector of a clamped cubic spline: `interior` knots plus the two end
/// knots, each end repeated four times.
std::vector<double> clamped_cubic_knots(double a, double b, const std::vector<double>& interior);

} // namespace lfpca
