#include <defence/error.hpp>
#include <defence/fence_mask.hpp>

#include <gtest/gtest.h>

using namespace defence;

TEST(FenceMask, BinaryContract) {
    EXPECT_THROW(FenceMask(2, 1, std::vector<std::uint8_t>{0, 2}), InvalidArgument);
    FenceMask m(3, 3);
    EXPECT_EQ(m.fence_count(), 0u);
    m.set_fence(1, 2);
    EXPECT_EQ(m.fence_count(), 1u);
    EXPECT_DOUBLE_EQ(m.to_weights()(1, 2), 0.0);
    EXPECT_DOUBLE_EQ(m.to_weights()(0, 0), 1.0);
}

TEST(Dilate, ZeroIterationsIsIdentity) {
    FenceMask m(7, 7);
    m.set_fence(2, 5);
    EXPECT_EQ(dilate(m, 0), m);
    EXPECT_THROW(dilate(m, -1), InvalidArgument);
}

TEST(Dilate, SinglePixelGrowsIntoSquares) {
    FenceMask m(9, 9);
    m.set_fence(4, 4);
    const FenceMask one = dilate(m, 1);
    const FenceMask two = dilate(m, 2);
    EXPECT_EQ(one.fence_count(), 9u);
    EXPECT_EQ(two.fence_count(), 25u);
    for (int y = 2; y <= 6; ++y)
        for (int x = 2; x <= 6; ++x) EXPECT_TRUE(two.fence(x, y));
    EXPECT_TRUE(one.fence(3, 5));
    EXPECT_FALSE(one.fence(2, 4));
}

TEST(Dilate, IntersectKeepsFenceOfEither) {
    FenceMask a(2, 1), b(2, 1);
    a.set_fence(0, 0);
    b.set_fence(1, 0);
    EXPECT_EQ(a.intersect(b).fence_count(), 2u);
}
