#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "lfpca/covariance.hpp"
#include "lfpca/ingest.hpp"
#include "lfpca/lfpca.hpp"
#include "lfpca/sim.hpp"

using namespace lfpca;

namespace {

const Grid& grid1001() {
    static const Grid g = make_uniform_grid(1001, 0, 1);
    return g;
}

// Dense eigenpairs under quadrature via the generalized problem G W v = lambda v,
// solved independently of the library's symmetric transform.
Vector dense_spectrum(const Matrix& g, const Vector& w) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(w.asDiagonal() * g * w.asDiagonal(), w.asDiagonal());
    return solver.eigenvalues().reverse();
}

bool zero_outside(const EigenComponent& c, IndexInterval b) {
    for (Eigen::Index i = 0; i < c.eigenfunction.size(); ++i)
        if (!b.contains(static_cast<std::size_t>(i)) && c.eigenfunction(i) != 0.0) return false;
    return true;
}

} // namespace

TEST(EigendecomposeBlock, SinglePointBlock) {
    const auto grid = make_uniform_grid(5, 0, 1);
    Matrix m = Matrix::Identity(5, 5);
    m(2, 2) = 4.0;
    const auto comps = eigendecompose_block(CovMatrix(grid, m), {2, 2}, 3, 0);
    ASSERT_EQ(comps.size(), 1u);
    EXPECT_NEAR(comps[0].eigenvalue, 4.0 * grid.weights()(2), 1e-14);
    EXPECT_NEAR(grid.norm(comps[0].eigenfunction), 1.0, 1e-12);
    EXPECT_TRUE(zero_outside(comps[0], {2, 2}));
    EXPECT_GT(comps[0].eigenfunction(2), 0.0);
}

TEST(EigendecomposeBlock, FullBlockEqualsDenseDecomposition) {
    prop::Gen gen(61);
    const auto grid = gen.grid(30);
    const Matrix a = gen.normal_matrix(30, 30);
    const CovMatrix g(grid, 0.5 * (a * a.transpose() + (a * a.transpose()).transpose()));
    const auto comps = eigendecompose_block(g, {0, 29}, 30);
    const Vector dense = dense_spectrum(g.entries(), grid.weights());
    ASSERT_EQ(comps.size(), 30u);
    for (std::size_t j = 0; j < comps.size(); ++j) {
        EXPECT_NEAR(comps[j].eigenvalue, dense(static_cast<Eigen::Index>(j)), 1e-9 * dense(0));
        const Vector gw = g.entries() * grid.weights().asDiagonal() * comps[j].eigenfunction;
        EXPECT_LT((gw - comps[j].eigenvalue * comps[j].eigenfunction).cwiseAbs().maxCoeff(), 1e-8 * dense(0));
    }
}

TEST(EigendecomposeBlock, DesignAFirstBlockMatchesB1) {
    const auto design = sim::SimDesign::make(sim::DesignName::A);
    const auto g = sim::population_covariance(design, grid1001());
    const auto truth = sim::true_partition(grid1001());
    const auto comps = eigendecompose_block(g, truth[0], 3, 0);
    ASSERT_FALSE(comps.empty());
    EXPECT_NEAR(comps[0].eigenvalue, 36.0, 0.36);
    const Matrix basis = sim::build_basis(design, grid1001());
    EXPECT_GT(*sim::abs_pearson(comps[0].eigenfunction, basis.col(0)), 0.999);
}

TEST(EigendecomposeBlock, Errors) {
    const auto grid = make_uniform_grid(3, 0, 1);
    const CovMatrix g(grid, Matrix::Identity(3, 3));
    EXPECT_THROW(eigendecompose_block(g, {0, 3}, 1), InvalidArgument);
    EXPECT_THROW(eigendecompose_block(g, {0, 2}, 0), InvalidArgument);
    Matrix bad = Matrix::Identity(3, 3);
    bad(1, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(eigendecompose_block(CovMatrix(grid, bad), {0, 2}, 1), NumericError);
}

TEST(EigendecomposeBlock, FlagsDegenerateEigenvalues) {
    const auto grid = make_uniform_grid(4, 0, 3);   // unit interior weights
    Matrix m = Matrix::Zero(4, 4);
    m(1, 1) = m(2, 2) = 2.0;
    const auto comps = eigendecompose_block(CovMatrix(grid, m), {1, 2}, 2);
    ASSERT_EQ(comps.size(), 2u);
    EXPECT_TRUE(comps[0].degenerate);
    EXPECT_TRUE(comps[1].degenerate);
}

TEST(LocalizedFpca, TwoSinglePointBlocks) {
    const Grid grid(Vector::LinSpaced(2, 0, 2), Vector::Ones(2));
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = 9.0;
    const auto sys = localized_fpca(CovMatrix(grid, m), BlockPartition::from_ends({0, 1}, 2), 2, 1);
    ASSERT_EQ(sys.components.size(), 2u);
    EXPECT_DOUBLE_EQ(sys.components[0].eigenvalue, 9.0);
    EXPECT_DOUBLE_EQ(sys.components[1].eigenvalue, 1.0);
    EXPECT_EQ(sys.components[0].block_id, 1u);
    EXPECT_NEAR(sys.pve_per_block[0], 0.1, 1e-15);
    EXPECT_NEAR(sys.pve_per_block[1], 0.9, 1e-15);
    EXPECT_FALSE(sys.clamped);
}

TEST(LocalizedFpca, DesignAPopulation) {
    const auto design = sim::SimDesign::make(sim::DesignName::A);
    const auto sys = localized_fpca(sim::population_covariance(design, grid1001()), sim::true_partition(grid1001()), 8, 8);
    ASSERT_GE(sys.components.size(), 3u);
    const double expected[] = {36, 16, 4};
    for (std::size_t l = 0; l < 3; ++l) {
        EXPECT_NEAR(sys.components[l].eigenvalue, expected[l], 0.01 * expected[l]);
        EXPECT_EQ(sys.components[l].block_id, l);
    }
    const double pve[] = {0.6385, 0.2843, 0.0718};
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(sys.pve_per_block[k], pve[k], 0.01);
}

TEST(LocalizedFpca, DesignBPopulationFirstBlockCarriesTwoComponents) {
    const auto design = sim::SimDesign::make(sim::DesignName::B);
    const auto sys = localized_fpca(sim::population_covariance(design, grid1001()), sim::true_partition(grid1001()), 8, 8);
    std::vector<double> first;
    for (const auto& c : sys.components)
        if (c.block_id == 0) first.push_back(c.eigenvalue);
    ASSERT_GE(first.size(), 2u);
    EXPECT_NEAR(first[0], 25.2, 0.252);
    EXPECT_NEAR(first[1], 10.8, 0.108);
}

TEST(LocalizedFpca, ClampsWhenTooFewComponents) {
    const auto grid = make_uniform_grid(3, 0, 1);
    const auto sys = localized_fpca(CovMatrix(grid, Matrix::Identity(3, 3)), BlockPartition::single(3), 10, 10);
    EXPECT_TRUE(sys.clamped);
    EXPECT_EQ(sys.components.size(), 3u);
    EXPECT_EQ(sys.requested_components, 10u);
    EXPECT_THROW(localized_fpca(CovMatrix(grid, Matrix::Identity(3, 3)), BlockPartition::single(3), 0, 1),
                 InvalidArgument);
    EXPECT_THROW(localized_fpca(CovMatrix(grid, Matrix::Identity(3, 3)), BlockPartition::single(4), 1, 1),
                 InvalidArgument);
}

TEST(LocalizedFpca, TotalVarianceIncludesUnretained) {
    const auto grid = make_uniform_grid(4, 0, 3);
    Matrix m = Matrix::Zero(4, 4);
    m.diagonal() << 1, 4, 2, 3;
    const auto sys = localized_fpca(CovMatrix(grid, m), BlockPartition::from_ends({1, 3}, 4), 1, 1);
    const double total = (m.diagonal().array() * grid.weights().array()).sum();
    EXPECT_NEAR(sys.total_variance, total, 1e-14);
    ASSERT_EQ(sys.components.size(), 1u);
    EXPECT_NEAR(sys.pve_per_block[0] + sys.pve_per_block[1], 1.0, 1e-14);
}

TEST(StandardFpca, IsSingleBlockCase) {
    const auto design = sim::SimDesign::make(sim::DesignName::A);
    const auto g = sim::population_covariance(design, make_uniform_grid(101, 0, 1));
    const auto a = standard_fpca(g, 5);
    const auto b = localized_fpca(g, BlockPartition::single(101), 5, 5);
    ASSERT_EQ(a.components.size(), b.components.size());
    for (std::size_t l = 0; l < a.components.size(); ++l) EXPECT_EQ(a.components[l].eigenfunction, b.components[l].eigenfunction);
}

TEST(EigenUnionCheck, Examples) {
    prop::Gen gen(62);
    const auto grid = make_uniform_grid(60, 0, 1);
    const auto part = gen.partition(60, 3);
    const CovMatrix g(grid, gen.block_diagonal_psd(part));
    EXPECT_LT(eigen_union_check(g, part).value, 1e-8);
    EXPECT_FALSE(eigen_union_check(g, part).precondition_violated);
    EXPECT_LT(eigen_union_check(g, BlockPartition::single(60)).value, 1e-10);

    Matrix d = Matrix::Zero(5, 5);
    d.diagonal() << 3, 1, 4, 1, 5;
    const auto r = eigen_union_check(CovMatrix(make_uniform_grid(5, 0, 1), d), BlockPartition::from_ends({0, 1, 2, 3, 4}, 5));
    EXPECT_LT(r.value, 1e-14);
}

TEST(EigenUnionCheck, FlagsOffBlockMass) {
    Matrix m = Matrix::Identity(4, 4);
    m(0, 3) = m(3, 0) = 0.25;
    const auto r = eigen_union_check(CovMatrix(make_uniform_grid(4, 0, 1), m), BlockPartition::from_ends({1, 3}, 4));
    EXPECT_TRUE(r.precondition_violated);
    EXPECT_DOUBLE_EQ(r.value, 0.25);
}

TEST(Scores, EigenfunctionHasUnitScore) {
    const auto design = sim::SimDesign::make(sim::DesignName::A);
    const auto sys = localized_fpca(sim::population_covariance(design, grid1001()), sim::true_partition(grid1001()), 5, 5);
    Matrix rows(2, 1001);
    rows.row(0) = sys.components[0].eigenfunction.transpose();
    rows.row(1).setZero();
    const auto s = compute_scores(CurveSet(grid1001(), rows, true), sys);
    EXPECT_NEAR(s.values(0, 0), 1.0, 1e-8);
    for (Eigen::Index l = 1; l < s.values.cols(); ++l) EXPECT_NEAR(s.values(0, l), 0.0, 1e-8);
    EXPECT_EQ(s.values.row(1), Eigen::RowVectorXd::Zero(s.values.cols()));
}

TEST(Scores, Errors) {
    const auto grid = make_uniform_grid(3, 0, 1);
    const auto sys = localized_fpca(CovMatrix(grid, Matrix::Identity(3, 3)), BlockPartition::single(3), 2, 2);
    EXPECT_THROW(compute_scores(CurveSet(make_uniform_grid(3, 0, 2), Matrix::Zero(1, 3), true), sys), InvalidArgument);
    EXPECT_THROW(compute_scores(CurveSet(grid, Matrix::Zero(1, 3), false), sys), StateError);
    EXPECT_THROW(reconstruct(ScoreMatrix{Matrix::Zero(1, 3)}, sys), InvalidArgument);
}

TEST(Scores, VarianceTracksEigenvalues) {
    const auto design = sim::SimDesign::make(sim::DesignName::A, 0.0, 63);
    const auto sample = sim::generate(design, 1000, grid1001());
    const auto curves = center(sample.latent);
    const auto sys = localized_fpca(sim::population_covariance(design, grid1001()), sample.truth, 3, 3);
    const auto s = compute_scores(curves, sys);
    for (Eigen::Index l = 0; l < s.values.cols(); ++l) {
        const double var = s.values.col(l).squaredNorm() / 999.0;
        const double lambda = sys.components[static_cast<std::size_t>(l)].eigenvalue;
        EXPECT_NEAR(var, lambda, 0.2 * lambda);
    }
}

TEST(Reconstruct, SpanIsReproducedAndEmptySystemGivesZero) {
    prop::Gen gen(64);
    const auto grid = make_uniform_grid(40, 0, 1);
    const auto part = gen.partition(40, 4);
    const auto sys = localized_fpca(CovMatrix(grid, gen.block_diagonal_psd(part)), part, 6, 3);
    const Matrix coef = gen.normal_matrix(7, static_cast<Eigen::Index>(sys.components.size()));
    const CurveSet curves(grid, coef * eigenfunction_matrix(sys).transpose(), true);
    const auto back = reconstruct(compute_scores(curves, sys), sys);
    EXPECT_LT((back.values() - curves.values()).cwiseAbs().maxCoeff(), 1e-8);

    LocalizedEigenSystem empty = sys;
    empty.components.clear();
    const auto zero = reconstruct(ScoreMatrix{Matrix::Zero(7, 0)}, empty);
    EXPECT_EQ(zero.values(), Matrix::Zero(7, 40));
}

TEST(Reconstruct, DesignADenoisedCurves) {
    const auto s = sim::generate(sim::SimDesign::make(sim::DesignName::A, 0.1, 65), 250, grid1001());
    const auto den = denoise_kl(center(s.noisy), 0.99);
    const auto sys = localized_fpca(empirical_covariance(den.curves), s.truth, 10, den.retained);
    const auto back = reconstruct(compute_scores(den.curves, sys), sys);
    double rel = 0.0;
    for (Eigen::Index n = 0; n < back.values().rows(); ++n) {
        const Vector x = den.curves.values().row(n).transpose();
        const Vector y = back.values().row(n).transpose();
        rel += grid1001().norm(x - y) / grid1001().norm(x);
    }
    EXPECT_LT(rel / static_cast<double>(back.values().rows()), 0.05);
}
