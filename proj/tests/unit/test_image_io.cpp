#include "test_support.hpp"

#include <defence/error.hpp>
#include <defence/fence_mask.hpp>
#include <defence/image_io.hpp>

#include <gtest/gtest.h>

#include <fstream>

using namespace defence;

TEST(ImageIo, GrayRoundTripIsLossless) {
    const auto dir = support::temp_dir("io_gray");
    const ImagePlane img(2, 2, std::vector<double>{0, 64, 128, 255});
    write_image(dir / "g.png", img);
    const ColorImage back = read_image(dir / "g.png");
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(back.channel(c), img);
}

TEST(ImageIo, RgbRoundTripIsLossless) {
    const auto dir = support::temp_dir("io_rgb");
    std::mt19937_64 rng(1);
    ColorImage img(5, 3);
    for (std::size_t c = 0; c < 3; ++c) {
        for (double& v : img.channel(c).values()) v = std::uniform_int_distribution<int>(0, 255)(rng);
    }
    write_image(dir / "c.png", img);
    EXPECT_EQ(read_image(dir / "c.png"), img);
}

TEST(ImageIo, QuantizesByRoundingAndClamping) {
    const auto dir = support::temp_dir("io_quant");
    write_image(dir / "q.png", ImagePlane(3, 1, std::vector<double>{-5.0, 12.6, 300.0}));
    const ColorImage back = read_image(dir / "q.png");
    EXPECT_EQ(back.channel(0).vector(), (std::vector<double>{0.0, 13.0, 255.0}));
}

TEST(ImageIo, TruncatedFileIsAnError) {
    const auto dir = support::temp_dir("io_trunc");
    write_image(dir / "t.png", ImagePlane(32, 32, 7.0));
    std::ifstream in(dir / "t.png", std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    std::ofstream(dir / "cut.png", std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    EXPECT_ANY_THROW(read_image(dir / "cut.png"));
    EXPECT_THROW(read_image(dir / "missing.png"), IoError);
}

TEST(ImageIo, MaskConvention) {
    const auto dir = support::temp_dir("io_mask");
    FenceMask m(4, 2);
    m.set_fence(1, 0);
    m.set_fence(3, 1);
    write_mask(dir / "m.png", m);
    const ColorImage raw = read_image(dir / "m.png");
    EXPECT_DOUBLE_EQ(raw.channel(0)(1, 0), 0.0);
    EXPECT_DOUBLE_EQ(raw.channel(0)(0, 0), 255.0);
    EXPECT_EQ(read_mask(dir / "m.png"), m);
}
