#include "test_support.hpp"

#include <defence/error.hpp>
#include <defence/hog.hpp>
#include <defence/sliding_window.hpp>
#include <defence/svm.hpp>

#include <gtest/gtest.h>

using namespace defence;

namespace {

constexpr int kW = 96;
constexpr int kH = 104;

/// Dark vertical bars on a noisy bright ground.
ImagePlane fence_patch(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> period(14, 22), phase(0, 13);
    const int p = period(rng), ph = phase(rng);
    ImagePlane img = support::random_plane(kW, kH, rng, 170, 230);
    for (int y = 0; y < kH; ++y)
        for (int x = 0; x < kW; ++x)
            if ((x + ph) % p < 4) img(x, y) = 30.0;
    return img;
}

/// Smooth blobs, no bars.
ImagePlane background_patch(std::mt19937_64& rng) {
    return gaussian_blur(support::random_plane(kW, kH, rng, 60, 200), 4.0);
}

const SvmModel& trained_model() {
    static const SvmModel model = [] {
        std::mt19937_64 rng(21);
        std::vector<LabeledPatch> patches;
        for (int i = 0; i < 15; ++i) patches.push_back({fence_patch(rng), PatchLabel::Fence});
        for (int i = 0; i < 15; ++i) patches.push_back({background_patch(rng), PatchLabel::NonFence});
        return train_svm(patches, {}).model;
    }();
    return model;
}

SvmModel constant_model(double bias) {
    SvmModel m;
    m.support_vectors = {HogDescriptor{std::vector<double>(4752, 0.0)}};
    m.dual_coefs = {0.0};
    m.bias = bias;
    return m;
}

}  // namespace

TEST(SlidingWindow, NoPositiveWindowsGivesAllValid) {
    std::mt19937_64 rng(1);
    const ImagePlane img = support::random_plane(200, 160, rng);
    const SvmDetection d = detect_fence_svm(img, constant_model(-1.0), {8, {1.0}, {}});
    EXPECT_EQ(d.mask.fence_count(), 0u);
    EXPECT_TRUE(d.hits.empty());
}

TEST(SlidingWindow, AllPositiveCoverageMatchesWindowOracle) {
    std::mt19937_64 rng(2);
    const ImagePlane img = support::random_plane(203, 150, rng);
    const SvmDetection d = detect_fence_svm(img, constant_model(1.0), {8, {1.0}, {}});
    FenceMask want(203, 150);
    for (int y = 0; y + kH <= 150; y += 8)
        for (int x = 0; x + kW <= 203; x += 8)
            for (int j = 0; j < kH; ++j)
                for (int i = 0; i < kW; ++i) want.set_fence(x + i, y + j);
    EXPECT_EQ(d.mask, want);
    EXPECT_EQ(d.windows_scanned, d.hits.size());
}

TEST(SlidingWindow, TemplateDensityBoundsFenceFraction) {
    std::mt19937_64 rng(3);
    const ImagePlane img = support::random_plane(192, 200, rng);
    FenceMask tmpl(kW, kH);
    for (int y = 0; y < kH; ++y)
        for (int x = 0; x < kW; ++x)
            if (x % 12 < 3) tmpl.set_fence(x, y);
    SvmDetectOptions o{96, {1.0}, tmpl};
    const SvmDetection d = detect_fence_svm(img, constant_model(1.0), o);
    // Stride equals window width, so columns tile exactly; rows overlap but the stripes do not vary in y.
    const double density = static_cast<double>(tmpl.fence_count()) / (kW * kH);
    EXPECT_DOUBLE_EQ(static_cast<double>(d.mask.fence_count()) / (192 * 200), density);
}

TEST(SlidingWindow, SmallScalesAreSkippedWithWarning) {
    const ImagePlane img(120, 120, 10.0);
    const SvmDetection d = detect_fence_svm(img, constant_model(1.0), {8, {1.0, 0.5}, {}});
    EXPECT_EQ(d.warnings.size(), 1u);
    EXPECT_GT(d.mask.fence_count(), 0u);
}

TEST(SlidingWindow, RejectsBadOptions) {
    const ImagePlane img(120, 120);
    EXPECT_THROW(detect_fence_svm(img, constant_model(1.0), {0, {1.0}, {}}), InvalidArgument);
    EXPECT_THROW(detect_fence_svm(img, constant_model(1.0), {8, {1.0}, FenceMask(10, 10)}), InvalidArgument);
}

TEST(SlidingWindow, PlantedPatchIsLocalized) {
    const SvmModel& model = trained_model();
    std::mt19937_64 rng(4);
    ImagePlane img = gaussian_blur(support::random_plane(320, 312, rng, 60, 200), 4.0);
    const ImagePlane patch = fence_patch(rng);
    const int px = 136, py = 104;  // on the stride-8 grid
    for (int y = 0; y < kH; ++y)
        for (int x = 0; x < kW; ++x) img(px + x, py + y) = patch(x, y);
    const SvmDetection d = detect_fence_svm(img, model, {8, {1.0}, {}});
    bool found = false;
    for (const auto& h : d.hits) found |= (h.x == px && h.y == py);
    EXPECT_TRUE(found);
    for (int y = py; y < py + kH; ++y)
        for (int x = px; x < px + kW; ++x) ASSERT_TRUE(d.mask.fence(x, y));
    // Windows far from the plant stay quiet.
    EXPECT_TRUE(d.mask.valid(10, 10));
    EXPECT_TRUE(d.mask.valid(310, 300));
}

TEST(SlidingWindow, FinerStrideFindsSupersetOfHits) {
    const SvmModel& model = trained_model();
    std::mt19937_64 rng(5);
    ImagePlane img = gaussian_blur(support::random_plane(256, 232, rng, 60, 200), 4.0);
    const ImagePlane patch = fence_patch(rng);
    for (int y = 0; y < kH; ++y)
        for (int x = 0; x < kW; ++x) img(64 + x, 48 + y) = patch(x, y);
    const SvmDetection fine = detect_fence_svm(img, model, {8, {1.0}, {}});
    const SvmDetection coarse = detect_fence_svm(img, model, {16, {1.0}, {}});
    for (const auto& h : coarse.hits) {
        bool present = false;
        for (const auto& f : fine.hits) present |= (f.x == h.x && f.y == h.y);
        EXPECT_TRUE(present);
    }
    for (std::size_t i = 0; i < coarse.mask.size(); ++i) {
        if (!coarse.mask.bits()[i]) EXPECT_FALSE(fine.mask.bits()[i]);
    }
}

TEST(Crop, CopiesRectangle) {
    ImagePlane img(4, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) img(x, y) = 10 * y + x;
    const ImagePlane c = crop(img, 1, 1, 2, 2);
    EXPECT_EQ(c.vector(), (std::vector<double>{11, 12, 21, 22}));
    EXPECT_THROW(crop(img, 3, 0, 2, 2), InvalidArgument);
}
