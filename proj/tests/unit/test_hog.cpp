#include "test_support.hpp"

#include <defence/error.hpp>
#include <defence/hog.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace defence;

TEST(HogConfig, DefaultDescriptorLength) {
    const HogConfig cfg;
    EXPECT_EQ(cfg.cells_x(), 12);
    EXPECT_EQ(cfg.cells_y(), 13);
    EXPECT_EQ(cfg.descriptor_length(), 4752u);
    HogConfig bad;
    bad.window_width = 100;
    EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Hog, ConstantWindowGivesZeros) {
    const HogDescriptor d = hog(ImagePlane(96, 104, 77.0));
    ASSERT_EQ(d.size(), 4752u);
    for (double v : d.values) EXPECT_EQ(v, 0.0);
}

TEST(Hog, SizeMismatchThrows) {
    EXPECT_THROW(hog(ImagePlane(96, 96)), InvalidArgument);
}

TEST(Hog, SingleCellHistogramMatchesHandComputation) {
    // One 8x8 cell, tiny window so every gradient is checked by hand.
    HogConfig cfg;
    cfg.window_width = 16;
    cfg.window_height = 16;
    ImagePlane w(16, 16);
    std::mt19937_64 rng(11);
    for (double& v : w.values()) v = std::uniform_int_distribution<int>(0, 255)(rng);
    const std::vector<double> cells = cell_histograms(w, cfg);
    ASSERT_EQ(cells.size(), 4u * 9u);

    // Cell (1, 0): x in [8, 16), y in [0, 8).
    std::vector<double> want(9, 0.0);
    for (int y = 0; y < 8; ++y) {
        for (int x = 8; x < 16; ++x) {
            const double gx = w.clamped(x + 1, y) - w.clamped(x - 1, y);
            const double gy = w.clamped(x, y + 1) - w.clamped(x, y - 1);
            const double mag = std::sqrt(gx * gx + gy * gy);
            if (mag == 0.0) continue;
            double deg = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
            while (deg < 0) deg += 180.0;
            while (deg >= 180.0) deg -= 180.0;
            want[std::min(8, static_cast<int>(deg / 20.0))] += mag;
        }
    }
    for (int b = 0; b < 9; ++b) EXPECT_NEAR(cells[9 + b], want[b], 1e-9) << "bin " << b;
}

TEST(Hog, HorizontalRampFallsInZeroDegreeBin) {
    ImagePlane ramp(96, 104);
    for (int y = 0; y < 104; ++y)
        for (int x = 0; x < 96; ++x) ramp(x, y) = 2.0 * x;
    const HogConfig cfg;
    const std::vector<double> cells = cell_histograms(ramp, cfg);
    for (std::size_t c = 0; c < cells.size() / 9; ++c) {
        EXPECT_GT(cells[c * 9], 0.0);
        for (int b = 1; b < 9; ++b) EXPECT_EQ(cells[c * 9 + b], 0.0);
    }
    // Interior block: all four cells carry equal mass, so the normalized
    // nonzero entries are equal (0.5 each up to the epsilon).
    const HogDescriptor d = hog(ramp, cfg);
    const std::size_t block = (3 * 11 + 4) * 36;
    for (int c = 0; c < 4; ++c) {
        EXPECT_NEAR(d.values[block + c * 9], 0.5, 1e-6);
        for (int b = 1; b < 9; ++b) EXPECT_EQ(d.values[block + c * 9 + b], 0.0);
    }
}

TEST(Hog, BlockNormsBoundedAndNonNegative) {
    std::mt19937_64 rng(3);
    const ImagePlane w = support::random_plane(96, 104, rng);
    const HogDescriptor d = hog(w);
    for (std::size_t b = 0; b < d.size() / 36; ++b) {
        double s = 0.0;
        for (int i = 0; i < 36; ++i) {
            EXPECT_GE(d.values[b * 36 + i], 0.0);
            s += d.values[b * 36 + i] * d.values[b * 36 + i];
        }
        EXPECT_LE(std::sqrt(s), 1.0 + 1e-9);
    }
}

TEST(Hog, InvariantToAdditiveShiftWithoutPreprocessing) {
    std::mt19937_64 rng(4);
    ImagePlane w = support::random_plane(96, 104, rng, 0, 200);
    for (double& v : w.values()) v = std::round(v);  // integer pixels keep differences exact
    ImagePlane shifted = w;
    for (double& v : shifted.values()) v += 32.0;
    EXPECT_EQ(hog(w), hog(shifted));
}

TEST(Equalize, TwoLevelImageMapsThroughCdf) {
    ImagePlane img(10, 10, 50.0);
    for (int y = 5; y < 10; ++y)
        for (int x = 0; x < 10; ++x) img(x, y) = 200.0;
    const ImagePlane eq = equalize_histogram(img);
    EXPECT_NEAR(eq(0, 0), 127.5, 1.0);
    EXPECT_NEAR(eq(0, 9), 255.0, 1e-9);
}

TEST(Equalize, ConstantStaysConstantAndUniformIsPreserved) {
    const ImagePlane eq = equalize_histogram(ImagePlane(8, 8, 33.0));
    for (double v : eq.values()) EXPECT_EQ(v, eq.values()[0]);

    ImagePlane uni(256, 1);
    for (int x = 0; x < 256; ++x) uni(x, 0) = x;
    const ImagePlane ue = equalize_histogram(uni);
    for (int x = 0; x < 256; ++x) EXPECT_NEAR(ue(x, 0), x, 1.0);
}
