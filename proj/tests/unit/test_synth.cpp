#include "test_support.hpp"

#include <defence/error.hpp>
#include <defence/synth.hpp>

#include <gtest/gtest.h>

using namespace defence;

namespace {

ColorImage texture_image(int w, int h) {
    ColorImage img(w, h);
    for (std::size_t c = 0; c < 3; ++c) img.channel(c) = support::Texture(20 + c).render(w, h);
    return img;
}

}  // namespace

TEST(Synth, FenceIsAxisAlignedGridWithOffset) {
    SynthConfig cfg;
    const FenceMask f = synth_fence(96, 96, cfg);
    for (int y = 0; y < 96; ++y) {
        for (int x = 0; x < 96; ++x) {
            const bool row = ((y - 24) % 48 + 48) % 48 < 7;
            const bool col = ((x - 24) % 48 + 48) % 48 < 7;
            EXPECT_EQ(f.fence(x, y), row || col) << x << "," << y;
        }
    }
}

TEST(Synth, ReferenceEqualsSourceOffTheFence) {
    const ColorImage src = texture_image(64, 64);
    const SynthResult r = synth_generate(src, SynthConfig{});
    ASSERT_EQ(r.frames.size(), 4u);
    ASSERT_EQ(r.masks.size(), 4u);
    EXPECT_EQ(r.truth, src);
    for (std::size_t c = 0; c < 3; ++c) {
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) {
                const double want = r.masks[0].valid(x, y) ? src.channel(c)(x, y) : 128.0;
                EXPECT_EQ(r.frames[0].channel(c)(x, y), want);
            }
    }
}

TEST(Synth, IntegerShiftsCopyExactly) {
    const ColorImage src = texture_image(48, 40);
    SynthConfig cfg;
    cfg.fence_width = 0;
    cfg.shifts = {{0, 0}, {3, -2}};
    const SynthResult r = synth_generate(src, cfg);
    EXPECT_EQ(r.masks[1].fence_count(), 0u);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 48; ++x) {
            const int sx = x - 3, sy = y + 2;
            const double want = (sx >= 0 && sy < 40) ? src.channel(1)(sx, sy) : 0.0;
            EXPECT_EQ(r.frames[1].channel(1)(x, y), want);
        }
}

TEST(Synth, FractionalShiftInterpolatesBilinearly) {
    const ColorImage src = texture_image(32, 32);
    SynthConfig cfg;
    cfg.fence_width = 0;
    cfg.shifts = {{0, 0}, {0.5, 0.25}};
    const SynthResult r = synth_generate(src, cfg);
    const ImagePlane& s = src.channel(0);
    for (int y = 2; y < 30; ++y)
        for (int x = 2; x < 30; ++x) {
            const double want = 0.75 * (0.5 * s(x - 1, y) + 0.5 * s(x, y)) +
                                0.25 * (0.5 * s(x - 1, y - 1) + 0.5 * s(x, y - 1));
            EXPECT_NEAR(r.frames[1].channel(0)(x, y), want, 1e-9);
        }
}

TEST(Synth, NoiseIsSeededAndSized) {
    const ColorImage src(64, 64, 100.0);
    SynthConfig cfg;
    cfg.fence_width = 0;
    cfg.noise_sigma = 5.0;
    cfg.shifts = {{0, 0}};
    const SynthResult a = synth_generate(src, cfg), b = synth_generate(src, cfg);
    EXPECT_EQ(a.frames[0], b.frames[0]);
    double s = 0, s2 = 0;
    for (double v : a.frames[0].channel(0).values()) {
        s += v - 100.0;
        s2 += (v - 100.0) * (v - 100.0);
    }
    const double n = 64.0 * 64.0;
    EXPECT_NEAR(s / n, 0.0, 0.5);
    EXPECT_NEAR(std::sqrt(s2 / n), 5.0, 0.5);
    cfg.seed = 2;
    EXPECT_NE(synth_generate(src, cfg).frames[0], a.frames[0]);
}

TEST(Synth, RejectsBadConfigs) {
    const ColorImage src(32, 32);
    SynthConfig cfg;
    cfg.shifts.clear();
    EXPECT_THROW(synth_generate(src, cfg), InvalidArgument);
    cfg = {};
    cfg.fence_period = 0;
    EXPECT_THROW(synth_generate(src, cfg), InvalidArgument);
    cfg = {};
    cfg.noise_sigma = -1;
    EXPECT_THROW(synth_generate(src, cfg), InvalidArgument);
    cfg = {};
    cfg.fence_width = -1;
    EXPECT_THROW(synth_generate(src, cfg), InvalidArgument);
}
