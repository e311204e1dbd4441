#include "polarface/eigenspace.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "polarface/model_io.hpp"
#include "polarface/rng.hpp"

using namespace polarface;

namespace {

GrayImage random_image(Rng& rng, std::size_t side) {
    GrayImage img(side, side);
    for (double& p : img.pixels) p = rng.uniform();
    return img;
}

// Independent oracle: eigendecompose the full D x D covariance (1/P) A A^T
// with Eigen and rescale by P to match the snapshot convention L = A^T A.
struct DirectPca {
    std::vector<double> eigenvalues;            // descending, rescaled by P
    std::vector<std::vector<double>> eigenvectors;  // unit norm
};

DirectPca direct_covariance_pca(const std::vector<GrayImage>& images) {
    const auto p = static_cast<Eigen::Index>(images.size());
    const auto d = static_cast<Eigen::Index>(images[0].size());
    Eigen::MatrixXd a(d, p);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (Eigen::Index c = 0; c < p; ++c)
        for (Eigen::Index i = 0; i < d; ++i) a(i, c) = images[c].pixels[i];
    for (Eigen::Index c = 0; c < p; ++c) mean += a.col(c);
    mean /= static_cast<double>(p);
    for (Eigen::Index c = 0; c < p; ++c) a.col(c) -= mean;

    const Eigen::MatrixXd cov = (a * a.transpose()) / static_cast<double>(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);

    DirectPca out;
    for (Eigen::Index k = d - 1; k >= 0; --k) {  // Eigen sorts ascending
        out.eigenvalues.push_back(solver.eigenvalues()(k) * static_cast<double>(p));
        std::vector<double> v(d);
        for (Eigen::Index i = 0; i < d; ++i) v[i] = solver.eigenvectors()(i, k);
        out.eigenvectors.push_back(std::move(v));
    }
    return out;
}

double sign_aligned_distance(const std::vector<double>& a, const std::vector<double>& b) {
    const double s = dot(a, b) >= 0.0 ? 1.0 : -1.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - s * b[i]));
    return worst;
}

}  // namespace

TEST(Jacobi, MatchesEigenOnRandomSymmetricMatrices) {
    Rng rng(55);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + rng.below(10);
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                const double v = rng.uniform(-1.0, 1.0);
                m(i, j) = v;
                m(j, i) = v;
            }
        const SymmetricEigen mine = jacobi_eigendecompose(m);

        Eigen::MatrixXd em(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) em(i, j) = m(i, j);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(em);

        for (std::size_t k = 0; k < n; ++k) {
            const double reference = solver.eigenvalues()(static_cast<Eigen::Index>(n - 1 - k));
            ASSERT_NEAR(mine.values[k], reference, 1e-10 * std::max(1.0, std::abs(reference)));
            // residual ||A v - lambda v||
            double resid = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double av = 0.0;
                for (std::size_t j = 0; j < n; ++j) av += m(i, j) * mine.vectors(j, k);
                resid = std::max(resid, std::abs(av - mine.values[k] * mine.vectors(i, k)));
            }
            ASSERT_LE(resid, 1e-9);
        }
    }
}

TEST(BuildEigenspace, IdenticalImagesGiveEmptyBasis) {
    const GrayImage img(4, 4, 0.25);
    const EigenSpace space = build_eigenspace({img, img});
    EXPECT_EQ(space.u(), 0u);
    for (double m : space.mean_face) EXPECT_DOUBLE_EQ(m, 0.25);
}

TEST(BuildEigenspace, SnapshotMatchesDirectCovarianceSmallCase) {
    Rng rng(7);
    std::vector<GrayImage> images;
    for (int i = 0; i < 3; ++i) images.push_back(random_image(rng, 2));
    const EigenSpace space = build_eigenspace(images, 1.0);
    const DirectPca direct = direct_covariance_pca(images);

    ASSERT_EQ(space.u(), 2u);  // P - 1
    for (std::size_t k = 0; k < space.u(); ++k) {
        EXPECT_NEAR(space.eigenvalues[k], direct.eigenvalues[k],
                    1e-8 * std::max(1.0, direct.eigenvalues[k]));
        EXPECT_LE(sign_aligned_distance(space.basis[k], direct.eigenvectors[k]), 1e-8);
    }
}

TEST(BuildEigenspace, TwoPointClosedForm) {
    const std::size_t side = 3;
    GrayImage x(side, side, 0.4);
    GrayImage y = x;
    const double c = 0.3;
    y.pixels[4] += c;  // x + c * e with e a unit coordinate vector

    const EigenSpace space = build_eigenspace({x, y}, 1.0);
    ASSERT_EQ(space.u(), 1u);
    EXPECT_NEAR(space.eigenvalues[0], c * c / 2.0, 1e-12);
    for (std::size_t i = 0; i < space.dim; ++i)
        EXPECT_NEAR(space.basis[0][i], i == 4 ? 1.0 : 0.0, 1e-12);
}

TEST(BuildEigenspace, BasisIsOrthonormal) {
    Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<GrayImage> images;
        const std::size_t p = 4 + rng.below(7);
        for (std::size_t i = 0; i < p; ++i) images.push_back(random_image(rng, 8));
        const EigenSpace space = build_eigenspace(images, 1.0);
        ASSERT_GE(space.u(), 1u);
        EXPECT_LE(space.u(), p - 1);
        for (std::size_t i = 0; i < space.u(); ++i)
            for (std::size_t j = i; j < space.u(); ++j) {
                const double expected = i == j ? 1.0 : 0.0;
                ASSERT_NEAR(dot(space.basis[i], space.basis[j]), expected, 1e-8)
                    << i << "," << j;
            }
        for (std::size_t k = 0; k + 1 < space.u(); ++k)
            ASSERT_GE(space.eigenvalues[k], space.eigenvalues[k + 1]);
    }
}

TEST(BuildEigenspace, VarianceAccountingAndMinimality) {
    Rng rng(29);
    std::vector<GrayImage> images;
    for (int i = 0; i < 8; ++i) images.push_back(random_image(rng, 6));
    const EigenSpace full = build_eigenspace(images, 1.0);
    double total = 0.0;
    for (double v : full.eigenvalues) total += v;

    const double keep = 0.80;
    const EigenSpace space = build_eigenspace(images, keep);
    double mass = 0.0;
    for (double v : space.eigenvalues) mass += v;
    EXPECT_GE(mass, keep * total - 1e-9);
    if (space.u() > 1) {
        EXPECT_LT(mass - space.eigenvalues.back(), keep * total);  // U is minimal
    }

    const EigenSpace capped = build_eigenspace(images, 1.0, 2);
    EXPECT_EQ(capped.u(), 2u);
}

TEST(Project, MeanGivesZeroAndBasisGivesUnitCoordinate) {
    Rng rng(41);
    std::vector<GrayImage> images;
    for (int i = 0; i < 5; ++i) images.push_back(random_image(rng, 4));
    const EigenSpace space = build_eigenspace(images, 1.0);
    ASSERT_GE(space.u(), 2u);

    GrayImage mean_img(4, 4);
    mean_img.pixels = space.mean_face;
    const FeatureVector at_mean = project(mean_img, space);
    for (double w : at_mean.coords) EXPECT_NEAR(w, 0.0, 1e-12);

    GrayImage along_u1(4, 4);
    for (std::size_t i = 0; i < space.dim; ++i)
        along_u1.pixels[i] = space.mean_face[i] + space.basis[0][i];
    const FeatureVector e1 = project(along_u1, space);
    EXPECT_NEAR(e1.coords[0], 1.0, 1e-9);
    for (std::size_t k = 1; k < space.u(); ++k) EXPECT_NEAR(e1.coords[k], 0.0, 1e-9);
}

TEST(Project, MatchesNaiveDotProducts) {
    Rng rng(43);
    std::vector<GrayImage> images;
    for (int i = 0; i < 6; ++i) images.push_back(random_image(rng, 5));
    const EigenSpace space = build_eigenspace(images, 1.0);
    const GrayImage probe = random_image(rng, 5);
    const FeatureVector fv = project(probe, space);
    for (std::size_t k = 0; k < space.u(); ++k) {
        double expected = 0.0;
        for (std::size_t i = 0; i < space.dim; ++i)
            expected += space.basis[k][i] * (probe.pixels[i] - space.mean_face[i]);
        ASSERT_DOUBLE_EQ(fv.coords[k], expected);
    }
}

TEST(Project, IsLinearOnConvexCombinations) {
    Rng rng(47);
    std::vector<GrayImage> images;
    for (int i = 0; i < 6; ++i) images.push_back(random_image(rng, 5));
    const EigenSpace space = build_eigenspace(images, 1.0);
    const GrayImage x = random_image(rng, 5);
    const GrayImage y = random_image(rng, 5);
    const double a = 0.3, b = 0.7;  // a + b = 1 keeps the pixels in range
    GrayImage mix(5, 5);
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix.pixels[i] = a * x.pixels[i] + b * y.pixels[i];
    const FeatureVector pm = project(mix, space);
    const FeatureVector px = project(x, space);
    const FeatureVector py = project(y, space);
    for (std::size_t k = 0; k < space.u(); ++k)
        ASSERT_NEAR(pm.coords[k], a * px.coords[k] + b * py.coords[k], 1e-9);
}

TEST(Reconstruct, ZeroVectorGivesMeanAndFullRankRecoversTraining) {
    Rng rng(53);
    std::vector<GrayImage> images;
    for (int i = 0; i < 6; ++i) images.push_back(random_image(rng, 5));
    const EigenSpace space = build_eigenspace(images, 1.0);
    ASSERT_EQ(space.u(), 5u);

    const auto at_mean = reconstruct(FeatureVector{std::vector<double>(space.u(), 0.0)}, space);
    for (std::size_t i = 0; i < space.dim; ++i)
        EXPECT_DOUBLE_EQ(at_mean[i], space.mean_face[i]);

    for (const GrayImage& img : images) {
        const auto rebuilt = reconstruct(project(img, space), space);
        for (std::size_t i = 0; i < space.dim; ++i)
            ASSERT_NEAR(rebuilt[i], img.pixels[i], 1e-6);
    }
}

TEST(Reconstruct, ErrorShrinksAsSubspaceGrows) {
    Rng rng(59);
    std::vector<GrayImage> images;
    for (int i = 0; i < 6; ++i) images.push_back(random_image(rng, 5));
    const EigenSpace full = build_eigenspace(images, 1.0);
    const GrayImage probe = random_image(rng, 5);
    const FeatureVector fv = project(probe, full);

    double prev_err = std::numeric_limits<double>::infinity();
    for (std::size_t u = 1; u <= full.u(); ++u) {
        EigenSpace truncated = full;
        truncated.basis.resize(u);
        truncated.eigenvalues.resize(u);
        FeatureVector head{std::vector<double>(fv.coords.begin(), fv.coords.begin() + u)};
        const auto rebuilt = reconstruct(head, truncated);
        double err = 0.0;
        for (std::size_t i = 0; i < full.dim; ++i) {
            const double d = rebuilt[i] - probe.pixels[i];
            err += d * d;
        }
        err = std::sqrt(err);
        ASSERT_LE(err, prev_err + 1e-12) << "U=" << u;
        prev_err = err;
    }
}

TEST(EigenspaceErrors, BadInputsAreRejected) {
    EXPECT_THROW(build_eigenspace({GrayImage(2, 2)}), std::invalid_argument);
    EXPECT_THROW(build_eigenspace({GrayImage(2, 2), GrayImage(3, 3)}), std::invalid_argument);
    EXPECT_THROW(build_eigenspace({GrayImage(2, 2), GrayImage(2, 2)}, 0.0),
                 std::invalid_argument);

    Rng rng(61);
    const EigenSpace space = build_eigenspace({random_image(rng, 3), random_image(rng, 3)});
    EXPECT_THROW(project(GrayImage(2, 2), space), std::invalid_argument);
    EXPECT_THROW(reconstruct(FeatureVector{{1.0, 2.0, 3.0}}, space), std::invalid_argument);
}

TEST(EigenspaceIo, JsonRoundTripIsExactAndDeterministic) {
    Rng rng(67);
    std::vector<GrayImage> images;
    for (int i = 0; i < 4; ++i) images.push_back(random_image(rng, 4));
    const EigenSpace space = build_eigenspace(images, 0.95);

    const nlohmann::json j = eigenspace_to_json(space);
    const EigenSpace back = eigenspace_from_json(j);
    EXPECT_EQ(back.dim, space.dim);
    EXPECT_EQ(back.side, space.side);
    EXPECT_EQ(back.mean_face, space.mean_face);
    EXPECT_EQ(back.basis, space.basis);
    EXPECT_EQ(back.eigenvalues, space.eigenvalues);
    EXPECT_EQ(back.variance_keep, space.variance_keep);
    EXPECT_EQ(j.dump(), eigenspace_to_json(back).dump());
}

TEST(EigenspaceIo, SignConventionMakesSerializationCanonical) {
    Rng rng(71);
    std::vector<GrayImage> images;
    for (int i = 0; i < 5; ++i) images.push_back(random_image(rng, 4));
    const EigenSpace space = build_eigenspace(images, 1.0);
    for (const auto& u : space.basis) {
        std::size_t imax = 0;
        for (std::size_t i = 1; i < u.size(); ++i)
            if (std::abs(u[i]) > std::abs(u[imax])) imax = i;
        EXPECT_GT(u[imax], 0.0);
    }
}
