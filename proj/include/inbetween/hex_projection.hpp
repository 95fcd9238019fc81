#pragma once

// Isometric projection of the design cube onto the hexagonal display plane.
// The kernel of the map is span{(1,1,1)}: opposite cube corners share the origin.

#include "inbetween/glyph_space.hpp"

#include <cmath>

namespace inbetween {

struct HexPoint {
    double u = 0.0;
    double v = 0.0;

    bool operator==(const HexPoint&) const = default;
};

inline HexPoint operator+(HexPoint a, HexPoint b) { return {a.u + b.u, a.v + b.v}; }
inline HexPoint operator-(HexPoint a, HexPoint b) { return {a.u - b.u, a.v - b.v}; }
inline HexPoint operator*(double s, HexPoint p) { return {s * p.u, s * p.v}; }

inline double norm(HexPoint p) { return std::hypot(p.u, p.v); }

inline constexpr double kSqrt3Over2 = 0.86602540378443864676;

/// Display-plane images of the three unit axis vectors (120 degrees apart).
inline constexpr HexPoint kAxisVectors[3] = {{1.0, 0.0}, {-0.5, kSqrt3Over2}, {-0.5, -kSqrt3Over2}};

inline HexPoint project(const DesignCoords& c) {
    HexPoint p;
    for (std::size_t i = 0; i < 3; ++i) {
        p.u += c[i] * kAxisVectors[i].u;
        p.v += c[i] * kAxisVectors[i].v;
    }
    return p;
}

inline bool collides(const DesignCoords& a, const DesignCoords& b, double eps) {
    return norm(project(a) - project(b)) < eps;
}

/// Position along the projection kernel.
inline double depth(const DesignCoords& c) { return c[0] + c[1] + c[2]; }

} // namespace inbetween
