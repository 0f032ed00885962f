// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "targetfill/mask.hpp"

namespace targetfill {
namespace {

using testing::box_mask;
using testing::brute_force_distance;
using testing::random_mask;

Mask five_by_five() { return box_mask(5, 5, 1, 4, 1, 4); }

Mask single_hole(int H, int W, int y, int x) { return box_mask(H, W, y, y + 1, x, x + 1); }

TEST(Mask, ConstructorValidates) {
    EXPECT_THROW(Mask(2, 2, {1, 0, 2, 1}), std::invalid_argument);
    EXPECT_THROW(Mask(2, 2, {1, 0, 1}), std::invalid_argument);
    const Mask m(1, 3, {1, 0, 1});
    EXPECT_EQ(m.hole_count(), 1u);
    EXPECT_TRUE(m.is_hole(0, 1));
    EXPECT_EQ(Mask::from_hole(m.hole()), m);
}

TEST(DistanceTransform, AllSceneIsZero) {
    const auto d = distance_transform(Mask::all_scene(4, 6));
    for (int v : d.distance) EXPECT_EQ(v, 0);
}

TEST(DistanceTransform, AllHoleIsRejected) {
    EXPECT_THROW(distance_transform(Mask::all_hole(3, 3)), std::invalid_argument);
}

TEST(DistanceTransform, FiveByFiveFixture) {
    const auto d = distance_transform(five_by_five());
    EXPECT_EQ(d.at(2, 2), 2);
    EXPECT_EQ(d.at(1, 1), 1);
    EXPECT_EQ(d.at(0, 0), 0);
    EXPECT_EQ(d.at(1, 2), 1);
}

TEST(DistanceTransform, MatchesBruteForceOnRandomMasks) {
    std::mt19937_64 gen(31);
    for (int i = 0; i < 200; ++i) {
        const int H = 1 + static_cast<int>(gen() % 16);
        const int W = 1 + static_cast<int>(gen() % 16);
        auto m = random_mask(H, W, gen, 0.2 + 0.7 * (i % 10) / 10.0);
        if (m.all_hole()) continue;
        ASSERT_EQ(distance_transform(m).distance, brute_force_distance(m)) << "case " << i;
    }
}

TEST(DistanceTransform, SingleScenePixelGivesManhattanCone) {
    std::vector<std::uint8_t> v(7 * 9, 0);
    v[3 * 9 + 5] = 1;
    const auto d = distance_transform(Mask(7, 9, v));
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 9; ++x) EXPECT_EQ(d.at(y, x), std::abs(y - 3) + std::abs(x - 5));
}

TEST(HeatedMask, BufferOneIsHoleIndicator) {
    std::mt19937_64 gen(5);
    for (int i = 0; i < 20; ++i) {
        const auto m = random_mask(10, 12, gen);
        if (m.all_hole()) continue;
        const auto h = heated_mask(m, 1);
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 12; ++x) ASSERT_EQ(h.at(y, x), m.is_hole(y, x) ? 1.0 : 0.0);
    }
}

TEST(HeatedMask, FiveByFiveWithBufferTwo) {
    const auto h = heated_mask(five_by_five(), 2);
    EXPECT_EQ(h.at(2, 2), 1.0);
    EXPECT_EQ(h.at(1, 1), 0.5);
    EXPECT_EQ(h.at(0, 0), 0.0);
}

TEST(HeatedMask, RejectsBufferBelowOne) {
    EXPECT_THROW(heated_mask(five_by_five(), 0), std::invalid_argument);
}

TEST(HeatedMask, MonotoneInDistanceAndBuffer) {
    std::mt19937_64 gen(8);
    for (int i = 0; i < 30; ++i) {
        const auto m = random_mask(16, 16, gen, 0.7);
        if (m.all_hole()) continue;
        const auto d = distance_transform(m);
        for (int b = 1; b <= 6; ++b) {
            const auto h = heated_mask(m, b);
            const auto h_next = heated_mask(m, b + 1);
            for (std::size_t k = 0; k < h.heat.size(); ++k) {
                ASSERT_GE(h.heat[k], 0.0);
                ASSERT_LE(h.heat[k], 1.0);
                ASSERT_LE(h_next.heat[k], h.heat[k]);
                for (std::size_t k2 = 0; k2 < h.heat.size(); ++k2) {
                    if (d.distance[k] <= d.distance[k2]) ASSERT_LE(h.heat[k], h.heat[k2]);
                }
            }
        }
    }
}

TEST(DilateHole, ZeroWidthIsIdentity) {
    const auto m = five_by_five();
    EXPECT_EQ(dilate_hole(m, 0), m);
}

TEST(DilateHole, SinglePixelGrowsToBlock) {
    const auto d = dilate_hole(single_hole(7, 7, 3, 3), 1);
    EXPECT_EQ(d, box_mask(7, 7, 2, 5, 2, 5));
}

TEST(DilateHole, SaturatesToAllHole) {
    EXPECT_TRUE(dilate_hole(single_hole(6, 9, 0, 0), 8).all_hole());
    EXPECT_FALSE(dilate_hole(single_hole(6, 9, 0, 0), 7).all_hole());
}

TEST(DilateHole, ClipsAtBorder) {
    EXPECT_EQ(dilate_hole(single_hole(5, 5, 0, 0), 1), box_mask(5, 5, 0, 2, 0, 2));
}

TEST(DilateHole, MonotoneAndExtensive) {
    std::mt19937_64 gen(12);
    for (int i = 0; i < 30; ++i) {
        const auto m = random_mask(14, 11, gen, 0.05);
        Mask prev = m;
        for (int w = 1; w <= 5; ++w) {
            const auto cur = dilate_hole(m, w);
            for (int y = 0; y < 14; ++y)
                for (int x = 0; x < 11; ++x) {
                    if (m.is_hole(y, x)) ASSERT_TRUE(cur.is_hole(y, x));
                    if (prev.is_hole(y, x)) ASSERT_TRUE(cur.is_hole(y, x));
                }
            prev = cur;
        }
    }
}

TEST(DilateHole, MatchesChebyshevDefinition) {
    std::mt19937_64 gen(99);
    for (int i = 0; i < 20; ++i) {
        const auto m = random_mask(12, 12, gen, 0.05);
        for (int w = 0; w <= 3; ++w) {
            const auto d = dilate_hole(m, w);
            for (int y = 0; y < 12; ++y)
                for (int x = 0; x < 12; ++x) {
                    bool near = false;
                    for (int yy = 0; yy < 12; ++yy)
                        for (int xx = 0; xx < 12; ++xx)
                            if (m.is_hole(yy, xx) && std::max(std::abs(yy - y), std::abs(xx - x)) <= w) near = true;
                    ASSERT_EQ(d.is_hole(y, x), near);
                }
        }
    }
}

TEST(Ring, ZeroWidthIsEmpty) { EXPECT_EQ(ring(five_by_five(), 0).count(), 0u); }

TEST(Ring, SinglePixelHasEightNeighbours) {
    const auto r = ring(single_hole(5, 5, 2, 2), 1);
    EXPECT_EQ(r.count(), 8u);
    EXPECT_FALSE(r.at(2, 2));
}

TEST(Ring, PartitionsImageWithHole) {
    std::mt19937_64 gen(3);
    for (int i = 0; i < 30; ++i) {
        const auto m = random_mask(13, 9, gen, 0.1);
        for (int w = 0; w <= 4; ++w) {
            const auto r = ring(m, w);
            const auto d = dilate_hole(m, w);
            for (int y = 0; y < 13; ++y)
                for (int x = 0; x < 9; ++x) {
                    const int classes = (m.is_hole(y, x) ? 1 : 0) + (r.at(y, x) ? 1 : 0) + (d.is_scene(y, x) ? 1 : 0);
                    ASSERT_EQ(classes, 1);
                }
        }
    }
}

}  // namespace
}  // namespace targetfill
