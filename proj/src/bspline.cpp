#include "lfpca/bspline.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace lfpca {

BSplineBasis::BSplineBasis(std::vector<double> knots, int degree) : knots_(std::move(knots)), degree_(degree) {
    if (degree_ < 0) throw InvalidArgument("spline degree must be non-negative");
    if (knots_.size() < static_cast<std::size_t>(2 * degree_ + 2))
        throw InvalidArgument(fmt::format("{} knots are too few for degree {}", knots_.size(), degree_));
    if (!std::is_sorted(knots_.begin(), knots_.end())) throw InvalidArgument("knots must be non-decreasing");
    if (!(knots_[static_cast<std::size_t>(degree_)] < knots_[knots_.size() - 1 - static_cast<std::size_t>(degree_)]))
        throw InvalidArgument("knot vector has an empty span");
}

std::size_t BSplineBasis::span(double x) const {
    const auto d = static_cast<std::size_t>(degree_);
    const auto n = count();
    if (x >= knots_[n]) return n - 1;
    // Largest mu in [d, n-1] with knots[mu] <= x.
    const auto it = std::upper_bound(knots_.begin() + static_cast<std::ptrdiff_t>(d),
                                     knots_.begin() + static_cast<std::ptrdiff_t>(n), x);
    return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

double BSplineBasis::value(std::size_t index, double x) const {
    if (index < 1 || index > count()) throw InvalidArgument(fmt::format("basis index {} outside 1..{}", index, count()));
    const auto d = static_cast<std::size_t>(degree_);
    if (x < knots_[d] || x > knots_[count()]) return 0.0;

    const auto mu = span(x);
    const auto i = index - 1;
    if (i + d < mu || i > mu) return 0.0;

    // Cox-de Boor on the d+1 functions that are nonzero on the span.
    std::vector<double> n(d + 1, 0.0), left(d + 1), right(d + 1);
    n[0] = 1.0;
    for (std::size_t j = 1; j <= d; ++j) {
        left[j] = x - knots_[mu + 1 - j];
        right[j] = knots_[mu + j] - x;
        double saved = 0.0;
        for (std::size_t r = 0; r < j; ++r) {
            const double temp = n[r] / (right[r + 1] + left[j - r]);
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }
    return n[i + d - mu];
}

Vector BSplineBasis::evaluate(std::size_t index, const Vector& points) const {
    Vector out(points.size());
    for (Eigen::Index p = 0; p < points.size(); ++p) out(p) = value(index, points(p));
    return out;
}

std::vector<double> clamped_cubic_knots(double a, double b, const std::vector<double>& interior) {
    std::vector<double> knots(4, a);
    knots.insert(knots.end(), interior.begin(), interior.end());
    knots.insert(knots.end(), 4, b);
    return knots;
}

} // namespace lfpca
