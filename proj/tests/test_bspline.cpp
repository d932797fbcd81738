#include <gtest/gtest.h>

#include "generators.hpp"
#include "lfpca/bspline.hpp"

using namespace lfpca;

namespace {

// Textbook recursion with the 0/0 = 0 convention and the right end assigned
// to the last non-empty span.
double oracle(const std::vector<double>& t, std::size_t i, int k, double x) {
    if (k == 0) {
        const double last = t.back();
        std::size_t last_span = t.size() - 2;
        while (t[last_span] == t[last_span + 1]) --last_span;
        if (x == last) return i == last_span ? 1.0 : 0.0;
        return t[i] <= x && x < t[i + 1] ? 1.0 : 0.0;
    }
    double v = 0.0;
    const auto ku = static_cast<std::size_t>(k);
    if (t[i + ku] > t[i]) v += (x - t[i]) / (t[i + ku] - t[i]) * oracle(t, i, k - 1, x);
    if (t[i + ku + 1] > t[i + 1]) v += (t[i + ku + 1] - x) / (t[i + ku + 1] - t[i + 1]) * oracle(t, i + 1, k - 1, x);
    return v;
}

} // namespace

TEST(BSpline, ClampedEndsAndCount) {
    const BSplineBasis b(clamped_cubic_knots(0, 1, {0.3, 0.375, 0.45, 0.525, 0.6, 0.7, 0.8, 0.9}), 3);
    EXPECT_EQ(b.count(), 12u);
    EXPECT_DOUBLE_EQ(b.value(1, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(b.value(12, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(b.value(1, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(b.value(5, 0.3), 0.0);
    EXPECT_GT(b.value(5, 0.45), 0.0);
    EXPECT_DOUBLE_EQ(b.value(5, 0.61), 0.0);
    EXPECT_DOUBLE_EQ(b.value(1, -0.1), 0.0);
    EXPECT_DOUBLE_EQ(b.value(12, 1.1), 0.0);
}

TEST(BSpline, LinearHatFunction) {
    const BSplineBasis b({0, 0, 1, 2, 2}, 1);
    EXPECT_EQ(b.count(), 3u);
    EXPECT_DOUBLE_EQ(b.value(2, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(b.value(2, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(b.value(2, 1.5), 0.5);
    EXPECT_DOUBLE_EQ(b.value(3, 2.0), 1.0);
}

TEST(BSpline, Errors) {
    EXPECT_THROW(BSplineBasis({0, 1}, 3), InvalidArgument);
    EXPECT_THROW(BSplineBasis({0, 0, 0, 0, 1, 0.5, 1, 1, 1}, 3), InvalidArgument);
    const BSplineBasis b(clamped_cubic_knots(0, 1, {}), 3);
    EXPECT_THROW(b.value(0, 0.5), InvalidArgument);
    EXPECT_THROW(b.value(5, 0.5), InvalidArgument);
}

TEST(BSplineProperty, MatchesRecursionAndPartitionOfUnity) {
    prop::for_all(71, 100, [](prop::Gen& gen, int) {
        const int degree = static_cast<int>(gen.size(0, 4));
        std::vector<double> interior(gen.size(0, 8));
        for (auto& k : interior) k = gen.uniform(0.0, 1.0);
        if (!interior.empty() && gen.coin()) interior.push_back(interior.front());   // repeated knot
        std::sort(interior.begin(), interior.end());
        std::vector<double> knots(static_cast<std::size_t>(degree) + 1, 0.0);
        knots.insert(knots.end(), interior.begin(), interior.end());
        knots.insert(knots.end(), static_cast<std::size_t>(degree) + 1, 1.0);
        const BSplineBasis b(knots, degree);
        for (int s = 0; s < 25; ++s) {
            const double x = s == 0 ? 0.0 : s == 1 ? 1.0 : gen.uniform(0.0, 1.0);
            double sum = 0.0;
            for (std::size_t i = 1; i <= b.count(); ++i) {
                const double v = b.value(i, x);
                EXPECT_NEAR(v, oracle(knots, i - 1, degree, x), 1e-12);
                EXPECT_GE(v, -1e-15);
                sum += v;
            }
            EXPECT_NEAR(sum, 1.0, 1e-12);
        }
    });
}
