#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace inbetween;

TEST(HexProjection, CubeCornersOntoHexagon) {
    EXPECT_EQ(project({0, 0, 0}), (HexPoint{0, 0}));
    EXPECT_NEAR(norm(project({1, 1, 1})), 0.0, 1e-15);
    EXPECT_EQ(project({1, 0, 0}), (HexPoint{1, 0}));
    const auto p = project({1, 1, 0});
    EXPECT_NEAR(p.u, 0.5, 1e-15);
    EXPECT_NEAR(p.v, std::sqrt(3.0) / 2.0, 1e-15);
}

TEST(HexProjection, SixVerticesAreARegularHexagon) {
    std::vector<double> angles;
    for (int b = 1; b < 7; ++b) {
        const auto p = project(corner_coords(static_cast<CornerMask>(b)));
        EXPECT_NEAR(norm(p), 1.0, 1e-9);
        angles.push_back(std::atan2(p.v, p.u));
    }
    std::sort(angles.begin(), angles.end());
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const double next = i + 1 < angles.size() ? angles[i + 1] : angles[0] + 2 * std::numbers::pi;
        EXPECT_NEAR(next - angles[i], std::numbers::pi / 3.0, 1e-9);
    }
}

TEST(HexProjection, Collides) {
    EXPECT_TRUE(collides({0, 0, 0}, {1, 1, 1}, 1e-9));
    EXPECT_TRUE(collides({0.25, 0.25, 0.25}, {0.75, 0.75, 0.75}, 1e-9));
    // |a0 - a1| = |(1.5, -sqrt(3)/2)| = sqrt(3).
    const double dist = std::hypot(1.0 - (-0.5), 0.0 - std::sqrt(3.0) / 2.0);
    EXPECT_NEAR(dist, std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(norm(project({1, 0, 0}) - project({0, 1, 0})), dist, 1e-12);
    EXPECT_FALSE(collides({1, 0, 0}, {0, 1, 0}, 0.1));
}

TEST(HexProjection, Depth) {
    EXPECT_EQ(depth({0, 0, 0}), 0.0);
    EXPECT_EQ(depth({1, 1, 1}), 3.0);
    EXPECT_EQ(depth({0.5, 0.25, 0.25}), 1.0);
}

TEST(HexProjectionProperty, Linearity) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const auto a = testing_support::random_coords(rng);
        const auto b = testing_support::random_coords(rng);
        const double t = u(rng);
        const DesignCoords mix(t * a[0] + (1 - t) * b[0], t * a[1] + (1 - t) * b[1], t * a[2] + (1 - t) * b[2]);
        const auto lhs = project(mix);
        const auto rhs = t * project(a) + (1 - t) * project(b);
        EXPECT_NEAR(lhs.u, rhs.u, 1e-12);
        EXPECT_NEAR(lhs.v, rhs.v, 1e-12);
    }
}

TEST(HexProjectionProperty, CollisionIffDifferenceAlongKernel) {
    std::vector<DesignCoords> lattice;
    for (int i = 0; i <= 4; ++i) {
        for (int j = 0; j <= 4; ++j) {
            for (int k = 0; k <= 4; ++k) {
                lattice.emplace_back(i / 4.0, j / 4.0, k / 4.0);
            }
        }
    }
    int colliding = 0;
    for (const auto& a : lattice) {
        for (const auto& b : lattice) {
            const double d0 = a[0] - b[0];
            const double d1 = a[1] - b[1];
            const double d2 = a[2] - b[2];
            const bool parallel = std::abs(d0 - d1) <= 1e-9 && std::abs(d1 - d2) <= 1e-9;
            EXPECT_EQ(collides(a, b, 1e-9), parallel);
            colliding += parallel && !(a == b);
        }
    }
    EXPECT_GT(colliding, 0);
}
