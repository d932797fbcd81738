#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "lfpca/covariance.hpp"
#include "lfpca/ingest.hpp"
#include "lfpca/sim.hpp"

using namespace lfpca;

namespace {

const std::vector<double> kLambda{36, 16, 4, 0.25, 0.0625, 0.04, 0.0225, 0.01};

} // namespace

TEST(EmpiricalCovariance, HandExamples) {
    const auto grid = make_uniform_grid(2, 0, 1);
    const auto a = empirical_covariance(CurveSet(grid, (Matrix(2, 2) << -1, -1, 1, 1).finished(), true));
    EXPECT_EQ(a.entries(), (Matrix(2, 2) << 2, 2, 2, 2).finished());
    EXPECT_EQ(a.sample_size(), 2u);
    const auto b = empirical_covariance(CurveSet(grid, (Matrix(2, 2) << -1, 1, 1, -1).finished(), true));
    EXPECT_EQ(b.entries(), (Matrix(2, 2) << 2, -2, -2, 2).finished());
}

TEST(EmpiricalCovariance, Errors) {
    const auto grid = make_uniform_grid(2, 0, 1);
    EXPECT_THROW(empirical_covariance(CurveSet(grid, Matrix::Ones(3, 2), false)), StateError);
    EXPECT_THROW(empirical_covariance(CurveSet(grid, Matrix::Zero(1, 2), true)), InvalidArgument);
}

TEST(EmpiricalCovarianceProperty, ExactlySymmetric) {
    prop::for_all(41, 50, [](prop::Gen& gen, int) {
        const auto grid = gen.grid(gen.size(2, 60));
        const auto curves = center(CurveSet(grid, gen.normal_matrix(static_cast<Eigen::Index>(gen.size(2, 40)),
                                                                    static_cast<Eigen::Index>(grid.size()))));
        const auto g = empirical_covariance(curves);
        EXPECT_EQ(g.entries(), g.entries().transpose());
    });
}

TEST(EmpiricalCovariance, DesignASampleNearPopulation) {
    const auto grid = make_uniform_grid(1001, 0.0, 1.0);
    const auto design = sim::SimDesign::make(sim::DesignName::A, 0.0, 17);
    const auto pop = sim::population_covariance(design, grid).entries();
    const auto sample = sim::generate(design, 1000, grid);
    const auto est = empirical_covariance(center(sample.latent)).entries();
    const Vector sd = pop.diagonal().cwiseSqrt();
    const Matrix normalized = (est - pop).cwiseAbs().cwiseQuotient(sd * sd.transpose());
    EXPECT_LT(normalized.maxCoeff(), 0.25);
}

TEST(ChooseTruncation, Examples) {
    EXPECT_EQ(choose_truncation(std::vector<double>{1, 0, 0}, 0.9), 1u);
    EXPECT_EQ(choose_truncation(kLambda, 0.90), 2u);
    EXPECT_EQ(choose_truncation(kLambda, 0.99), 3u);
    EXPECT_EQ(choose_truncation(kLambda, 1.0), 8u);
}

TEST(ChooseTruncation, Errors) {
    EXPECT_THROW(choose_truncation(std::vector<double>{0, 0}, 0.9), InvalidArgument);
    EXPECT_THROW(choose_truncation(std::vector<double>{1, 2}, 0.9), InvalidArgument);
    EXPECT_THROW(choose_truncation(kLambda, 0.0), InvalidArgument);
    EXPECT_THROW(choose_truncation(kLambda, 1.01), InvalidArgument);
}

TEST(ChooseTruncationProperty, MonotoneInPve) {
    prop::for_all(42, 300, [](prop::Gen& gen, int) {
        std::vector<double> lambda(gen.size(1, 20));
        for (auto& l : lambda) l = gen.coin() ? gen.uniform(0, 10) : 0.0;
        lambda[0] = gen.uniform(0.1, 10);
        std::sort(lambda.begin(), lambda.end(), std::greater<>());
        double a = gen.uniform(0.01, 1.0), b = gen.uniform(0.01, 1.0);
        if (a > b) std::swap(a, b);
        const auto la = choose_truncation(lambda, a), lb = choose_truncation(lambda, b);
        EXPECT_LE(la, lb);
        EXPECT_GE(la, 1u);
        double cum = 0, total = 0;
        for (auto l : lambda) total += l;
        for (std::size_t i = 0; i < lb; ++i) cum += lambda[i];
        EXPECT_GE(cum, b * total * (1 - 1e-12));
    });
}

TEST(QuadratureEigen, OrthonormalUnderWeights) {
    prop::for_all(43, 30, [](prop::Gen& gen, int) {
        const auto grid = gen.grid(gen.size(2, 50));
        const auto p = static_cast<Eigen::Index>(grid.size());
        const Matrix a = gen.normal_matrix(p, p);
        const Matrix g = a * a.transpose();
        const auto eig = quadrature_eigen(0.5 * (g + g.transpose()), grid.weights());
        EXPECT_LT(prop::orthonormality_error(grid, eig.functions), 1e-8);
        for (Eigen::Index j = 1; j < p; ++j) EXPECT_GE(eig.values(j - 1), eig.values(j));
        // G W psi = lambda psi
        const Matrix lhs = g * grid.weights().asDiagonal() * eig.functions;
        const Matrix rhs = eig.functions * eig.values.asDiagonal();
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-8 * (1 + g.cwiseAbs().maxCoeff()));
    });
}

TEST(QuadratureEigen, NonFiniteIsNumericError) {
    Matrix g = Matrix::Identity(2, 2);
    g(0, 1) = g(1, 0) = std::nan("");
    EXPECT_THROW(quadrature_eigen(g, Vector::Constant(2, 0.5)), NumericError);
}

TEST(NormalizeSign, LargestMagnitudePositiveLowestIndexOnTies) {
    Vector v(3);
    v << 0.5, -2.0, 1.0;
    normalize_sign(v);
    EXPECT_EQ(v, (Vector(3) << -0.5, 2.0, -1.0).finished());
    v << -1.0, 0.0, 1.0;
    normalize_sign(v);
    EXPECT_EQ(v, (Vector(3) << 1.0, 0.0, -1.0).finished());
}

TEST(DenoiseKl, RankOneDataIsReproduced) {
    const auto grid = make_uniform_grid(50, 0, 1);
    prop::Gen gen(44);
    const Vector v = gen.normal_matrix(50, 1).col(0);
    const Vector a = gen.normal_matrix(30, 1).col(0);
    const auto curves = center(CurveSet(grid, a * v.transpose()));
    const auto d = denoise_kl(curves, 0.99);
    EXPECT_EQ(d.retained, 1u);
    EXPECT_LT((d.curves.values() - curves.values()).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_TRUE(d.curves.centered());
    EXPECT_EQ(d.curves.grid(), grid);
}

TEST(DenoiseKl, FullPveReproducesFullRankData) {
    const auto grid = make_uniform_grid(20, 0, 1);
    prop::Gen gen(45);
    const auto curves = center(CurveSet(grid, gen.normal_matrix(60, 20)));
    const auto d = denoise_kl(curves, 1.0);
    EXPECT_LT((d.curves.values() - curves.values()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(DenoiseKl, ImprovesNoisyDesignACurves) {
    // At noise sd 0.1 the dropped Fourier components outweigh the noise, so
    // the comparison runs at sd 0.5 where denoising has something to remove.
    const auto grid = make_uniform_grid(1001, 0, 1);
    const auto design = sim::SimDesign::make(sim::DesignName::A, 0.5, 3);
    const auto s = sim::generate(design, 250, grid);
    const auto noisy = center(s.noisy);
    const Eigen::RowVectorXd mean = s.noisy.values().colwise().mean();
    const Matrix latent = s.latent.values().rowwise() - mean;
    const auto d = denoise_kl(noisy, 0.99);
    const double raw = (noisy.values() - latent).squaredNorm();
    const double den = (d.curves.values() - latent).squaredNorm();
    EXPECT_LT(den, raw);
}

TEST(DenoiseKlProperty, SecondApplicationIsNoOpWhenLevelIsKept) {
    prop::for_all(46, 20, [](prop::Gen& gen, int) {
        const auto grid = gen.grid(gen.size(5, 40));
        const auto p = static_cast<Eigen::Index>(grid.size());
        const auto rank = static_cast<Eigen::Index>(gen.size(1, 4));
        const Matrix x = gen.normal_matrix(static_cast<Eigen::Index>(gen.size(10, 60)), rank) *
                         gen.normal_matrix(rank, p);
        const auto curves = center(CurveSet(grid, x + 0.01 * gen.normal_matrix(x.rows(), p)));
        const auto once = denoise_kl(curves, 1.0);
        const auto twice = denoise_kl(once.curves, 1.0);
        EXPECT_LT((twice.curves.values() - once.curves.values()).cwiseAbs().maxCoeff(), 1e-10);
    });
}

TEST(DenoiseKl, SecondApplicationOnDesignAIsNoOp) {
    const auto grid = make_uniform_grid(1001, 0, 1);
    const auto s = sim::generate(sim::SimDesign::make(sim::DesignName::A, 0.1, 5), 250, grid);
    const auto once = denoise_kl(center(s.noisy), 0.99);
    const auto twice = denoise_kl(once.curves, 0.99);
    EXPECT_EQ(twice.retained, once.retained);
    EXPECT_LT((twice.curves.values() - once.curves.values()).cwiseAbs().maxCoeff(), 1e-10);
}
