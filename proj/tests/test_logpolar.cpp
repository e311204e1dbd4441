#include "polarface/logpolar.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <unordered_set>
#include <utility>

#include "polarface/rng.hpp"
#include "polarface/synth.hpp"

using namespace polarface;

namespace {

// Exhaustive search for the circular column shift aligning b to a.
std::pair<long long, double> best_column_shift(const GrayImage& a, const GrayImage& b) {
    long long best_k = 0;
    double best_mad = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < b.width; ++k) {
        const double mad = mean_abs_diff(a, circular_column_shift(b, static_cast<long long>(k)));
        if (mad < best_mad) {
            best_mad = mad;
            best_k = static_cast<long long>(k);
        }
    }
    const auto wrap = static_cast<long long>(b.width);
    if (best_k > wrap / 2) best_k -= wrap;
    return {best_k, best_mad};
}

GrayImage radial_gaussian(std::size_t side, double sigma) {
    FaceParams p;
    p.height = p.width = side;
    p.head_level = 0.0;
    p.background = 0.0;
    GaussianBlob blob;
    blob.sigma_u = blob.sigma_v = sigma;
    blob.amplitude = 1.0;
    p.blobs = {blob};
    return synth_face(0, p, 0.0, 1.0, 0.0);
}

}  // namespace

TEST(Geometry, MatchesCenterAndRadiusRule) {
    const PolarGeometry g = compute_geometry(240, 320, 2);
    EXPECT_EQ(g.center_row, 120u);
    EXPECT_EQ(g.center_col, 160u);
    EXPECT_DOUBLE_EQ(g.radius, 119.0);  // min(120, 160, 119, 159)
    EXPECT_EQ(g.exponent, 7u);          // 2^6 = 64 < 119 <= 128 = 2^7
    EXPECT_EQ(g.side, 128u);
}

TEST(Geometry, ExactPowerDoesNotOvershoot) {
    const PolarGeometry g = compute_geometry(33, 33, 2);
    EXPECT_EQ(g.center_row, 16u);
    EXPECT_DOUBLE_EQ(g.radius, 16.0);
    EXPECT_EQ(g.exponent, 4u);
    EXPECT_EQ(g.side, 16u);
}

TEST(Geometry, BaseThree) {
    const PolarGeometry g = compute_geometry(240, 320, 3);
    EXPECT_EQ(g.exponent, 5u);  // 3^4 = 81 < 119 <= 243 = 3^5
    EXPECT_EQ(g.side, 243u);
}

TEST(Geometry, RejectsTinyImagesAndBadBase) {
    EXPECT_THROW(compute_geometry(2, 5, 2), std::invalid_argument);
    EXPECT_THROW(compute_geometry(5, 2, 2), std::invalid_argument);
    EXPECT_THROW(compute_geometry(10, 10, 1), std::invalid_argument);
}

TEST(CartToPolar, CenterAxesAndTriangle) {
    const PolarGeometry g = compute_geometry(41, 41, 2);
    const auto center = cart_to_polar(20, 20, g);
    EXPECT_DOUBLE_EQ(center.r, 0.0);
    EXPECT_DOUBLE_EQ(center.theta_deg, 0.0);

    const auto triangle = cart_to_polar(23, 24, g);
    EXPECT_DOUBLE_EQ(triangle.r, 5.0);

    const auto axis = cart_to_polar(20, 25, g);
    EXPECT_DOUBLE_EQ(axis.r, 5.0);
    EXPECT_DOUBLE_EQ(axis.theta_deg, 90.0);
}

TEST(CartToPolar, AngleAlwaysInRange) {
    const PolarGeometry g = compute_geometry(51, 51, 2);
    Rng rng(4);
    for (int t = 0; t < 200; ++t) {
        const auto pc = cart_to_polar(rng.uniform(0, 50), rng.uniform(0, 50), g);
        ASSERT_GE(pc.r, 0.0);
        ASSERT_GE(pc.theta_deg, 0.0);
        ASSERT_LT(pc.theta_deg, 360.0);
    }
}

TEST(LogPolar, ConstantImageStaysConstant) {
    const GrayImage img(33, 47, 0.37);
    const GrayImage out = log_polar_transform(img, 2);
    EXPECT_EQ(out.height, out.width);
    for (double p : out.pixels) ASSERT_DOUBLE_EQ(p, 0.37);
}

// A radially symmetric input must give near-constant output rows: a very
// shallow profile bounds the per-row variance, a steeper one the spread
// introduced by nearest-neighbor quantization.
TEST(LogPolar, RadiallySymmetricImageHasConstantRows) {
    const GrayImage shallow = log_polar_transform(radial_gaussian(101, 200.0), 2);
    for (std::size_t i = 0; i < shallow.height; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < shallow.width; ++j) mean += shallow.at(i, j);
        mean /= static_cast<double>(shallow.width);
        double var = 0.0;
        for (std::size_t j = 0; j < shallow.width; ++j) {
            const double d = shallow.at(i, j) - mean;
            var += d * d;
        }
        var /= static_cast<double>(shallow.width);
        ASSERT_LE(var, 1e-6) << "row " << i;
    }

    const GrayImage steep = log_polar_transform(radial_gaussian(101, 50.0), 2);
    for (std::size_t i = 0; i < steep.height; ++i) {
        double lo = 1.0, hi = 0.0;
        for (std::size_t j = 0; j < steep.width; ++j) {
            lo = std::min(lo, steep.at(i, j));
            hi = std::max(hi, steep.at(i, j));
        }
        ASSERT_LE(hi - lo, 0.02) << "row " << i;
    }
}

TEST(LogPolar, RotationBecomesColumnShift) {
    const FaceParams params = face_params_for_subject(42, 3);
    const GrayImage base_polar = log_polar_transform(synth_face(42, params, 0.0, 1.0, 0.0), 2);
    const auto side = static_cast<double>(base_polar.width);
    for (double delta : {15.0, -15.0, 30.0, -30.0, 45.0, -45.0}) {
        const GrayImage rotated_polar =
            log_polar_transform(synth_face(42, params, delta, 1.0, 0.0), 2);
        const auto [k, mad] = best_column_shift(rotated_polar, base_polar);
        EXPECT_LE(std::abs(k - std::lround(side * delta / 360.0)), 1) << "delta " << delta;
        EXPECT_LE(mad, 0.05) << "delta " << delta;
    }
}

// Scaling content and frame together leaves the fixed-size output nearly
// unchanged. Base 3 on an 81x81 frame keeps the output side at 81 for every
// scale in [0.9, 2.0] (3^3 = 27 < R <= 81 throughout).
TEST(LogPolar, ScalingHasLittleEffectAtFixedSize) {
    const FaceParams params = face_params_for_subject(42, 5, 81, 81);
    const GrayImage base_polar = log_polar_transform(synth_face(42, params, 0.0, 1.0, 0.0), 3);
    ASSERT_EQ(base_polar.width, 81u);
    for (double s : {0.9, 1.1, 2.0}) {
        const auto frame = static_cast<std::size_t>(std::lround(81.0 * s));
        const GrayImage scaled = synth_face(42, params, 0.0, s, 0.0, frame, frame);
        const GrayImage scaled_polar = log_polar_transform(scaled, 3);
        ASSERT_EQ(scaled_polar.width, base_polar.width) << "scale " << s;
        EXPECT_LE(mean_abs_diff(scaled_polar, base_polar), 0.1) << "scale " << s;
    }
}

TEST(LogPolar, OutputSideIsAlwaysPowerOfBase) {
    Rng rng(17);
    for (int t = 0; t < 15; ++t) {
        const std::size_t h = 3 + rng.below(120);
        const std::size_t w = 3 + rng.below(120);
        const unsigned base = t % 2 == 0 ? 2 : 3;
        const GrayImage out = log_polar_transform(GrayImage(h, w, 0.5), base);
        EXPECT_EQ(out.height, out.width);
        std::size_t pow = 1;
        while (pow < out.width) pow *= base;
        EXPECT_EQ(pow, out.width) << h << "x" << w << " base " << base;
    }
}

TEST(LogPolar, OutputValuesComeFromSource) {
    Rng rng(23);
    GrayImage img(37, 29);
    for (double& p : img.pixels) p = rng.uniform();
    const GrayImage out = log_polar_transform(img, 2);
    std::unordered_set<double> source(img.pixels.begin(), img.pixels.end());
    for (double v : out.pixels) ASSERT_TRUE(source.count(v) > 0);
}

TEST(LogPolar, Deterministic) {
    const GrayImage img = synth_face(9, face_params_for_subject(9, 0));
    EXPECT_EQ(log_polar_transform(img, 2), log_polar_transform(img, 2));
}

TEST(ColumnShift, IdentityAndInverse) {
    Rng rng(31);
    GrayImage img(5, 8);
    for (double& p : img.pixels) p = rng.uniform();
    EXPECT_EQ(circular_column_shift(img, 0), img);
    EXPECT_EQ(circular_column_shift(img, 8), img);
    EXPECT_EQ(circular_column_shift(img, -16), img);
    EXPECT_EQ(circular_column_shift(circular_column_shift(img, 3), -3), img);
    // column j of the output is column (j - k) mod width of the input
    const GrayImage shifted = circular_column_shift(img, 3);
    for (std::size_t x = 0; x < img.height; ++x)
        for (std::size_t y = 0; y < img.width; ++y)
            ASSERT_DOUBLE_EQ(shifted.at(x, y), img.at(x, (y + 8 - 3) % 8));
}
