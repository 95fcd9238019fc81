#pragma once

// Procedural master generator for the demo space. Each master is an outline
// produced by expanding a fixed skeleton with a pen whose parameters sit at the
// extremes selected by the corner bitmask:
//   bit 0  weight     stem thickness 50 -> 200 units
//   bit 1  contrast   horizontal strokes thin from 100% to 30% of the stem
//   bit 2  structure  serifs shrink from 70 units to zero, bowls widen 10%
// Outer contours run counter-clockwise (y up), counters clockwise.

#include "inbetween/glyph_space.hpp"

namespace inbetween::demo {

struct Pen {
    double stem;
    double hair;
    double serif;
    double widen;
};

inline Pen pen_for_corner(CornerMask corner) {
    const double w = corner & 1 ? 1.0 : 0.0;
    const double k = corner & 2 ? 1.0 : 0.0;
    const double s = corner & 4 ? 1.0 : 0.0;
    Pen p;
    p.stem = 50.0 + 150.0 * w;
    p.hair = p.stem * (1.0 - 0.7 * k);
    p.serif = 70.0 * (1.0 - s);
    p.widen = 1.0 + 0.1 * s;
    return p;
}

namespace detail {

// Cubic approximation constant for a quarter ellipse.
inline constexpr double kKappa = 0.5522847498307936;

inline GlyphNode on(double x, double y) { return {x, y, NodeKind::OnCurve}; }
inline GlyphNode off(double x, double y) { return {x, y, NodeKind::OffCurve}; }

/// Full ellipse as 4 cubic segments starting at the rightmost point.
inline Contour ellipse(double cx, double cy, double rx, double ry, bool clockwise) {
    const double kx = kKappa * rx;
    const double ky = kKappa * ry;
    Contour c;
    c.closed = true;
    c.nodes = {
        on(cx + rx, cy),      off(cx + rx, cy + ky), off(cx + kx, cy + ry),
        on(cx, cy + ry),      off(cx - kx, cy + ry), off(cx - rx, cy + ky),
        on(cx - rx, cy),      off(cx - rx, cy - ky), off(cx - kx, cy - ry),
        on(cx, cy - ry),      off(cx + kx, cy - ry), off(cx + rx, cy - ky),
    };
    if (clockwise) {
        // Keep the first on-curve node, reverse the traversal.
        std::reverse(c.nodes.begin() + 1, c.nodes.end());
    }
    return c;
}

/// Stem with foot serifs on both sides and a head serif on the left.
inline Contour serifed_stem(double x0, double stem, double height, const Pen& p) {
    const double x1 = x0 + stem;
    const double f = p.serif;
    const double t = p.hair * 0.6;
    Contour c;
    c.closed = true;
    c.nodes = {
        on(x0 - f, 0.0),     on(x1 + f, 0.0),     on(x1 + f, t),       on(x1, t),
        on(x1, height),      on(x0 - f, height),  on(x0 - f, height - t),
        on(x0, height - t),  on(x0, t),           on(x0 - f, t),
    };
    return c;
}

inline GlyphOutline make_l(const Pen& p) {
    const double sb = 50.0 + p.serif;
    GlyphOutline g;
    g.glyphName = "l";
    g.contours.push_back(serifed_stem(sb, p.stem, 750.0, p));
    g.advanceWidth = sb + p.stem + p.serif + 50.0;
    return g;
}

inline GlyphOutline make_i(const Pen& p) {
    const double sb = 50.0 + p.serif;
    GlyphOutline g;
    g.glyphName = "i";
    g.contours.push_back(serifed_stem(sb, p.stem, 500.0, p));
    const double r = p.stem * 0.6 + 10.0;
    g.contours.push_back(ellipse(sb + p.stem / 2.0, 650.0, r, r, false));
    g.advanceWidth = sb + p.stem + p.serif + 50.0;
    return g;
}

inline GlyphOutline make_o(const Pen& p) {
    const double sb = 50.0;
    const double rx = 200.0 * p.widen;
    const double ry = 250.0;
    const double cx = sb + rx + p.stem / 2.0;
    const double cy = 250.0;
    GlyphOutline g;
    g.glyphName = "o";
    g.contours.push_back(ellipse(cx, cy, rx + p.stem / 2.0, ry + p.hair / 2.0, false));
    g.contours.push_back(ellipse(cx, cy, rx - p.stem / 2.0, ry - p.hair / 2.0, true));
    g.advanceWidth = 2.0 * cx;
    return g;
}

inline GlyphOutline make_n(const Pen& p) {
    const double x0 = 50.0;
    const double cw = 250.0 * p.widen;
    const double xa = x0 + p.stem;  // inner edge of left stem
    const double x2 = xa + cw;      // inner edge of right stem
    const double x3 = x2 + p.stem;  // outer edge of right stem
    const double xm = (xa + x2) / 2.0;
    const double join = 250.0;
    const double innerTop = 500.0 - p.hair;
    const double outerTop = 510.0;
    const double outerJoin = 420.0;
    const double k = kKappa;

    GlyphOutline g;
    g.glyphName = "n";
    Contour c;
    c.closed = true;
    c.nodes = {
        on(x0, 0.0),
        on(xa, 0.0),
        on(xa, join),
        // inner arch, left half
        off(xa, join + k * (innerTop - join)), off(xm - k * (xm - xa), innerTop), on(xm, innerTop),
        // inner arch, right half
        off(xm + k * (x2 - xm), innerTop), off(x2, join + k * (innerTop - join)), on(x2, join),
        on(x2, 0.0),
        on(x3, 0.0),
        on(x3, join),
        // outer arch, right half
        off(x3, join + k * (outerTop - join)), off(xm + k * (x3 - xm), outerTop), on(xm, outerTop),
        // outer arch, left half
        off(xm - k * (xm - xa), outerTop), off(xa, outerJoin + k * (outerTop - outerJoin)), on(xa, outerJoin),
        on(xa, 500.0),
        on(x0, 500.0),
    };
    g.contours.push_back(std::move(c));
    g.advanceWidth = x3 + 50.0;
    return g;
}

inline GlyphOutline make_space(const Pen& p) {
    GlyphOutline g;
    g.glyphName = "space";
    g.advanceWidth = 200.0 + p.stem / 2.0;
    return g;
}

} // namespace detail

/// The demo space: glyphs 'i', 'l', 'n', 'o' and 'space'.
inline DesignSpace make_demo_space() {
    DesignSpace space;
    space.axes = {{
        {0, "weight", "light", "regular", "bold"},
        {1, "contrast", "monolinear", "modulated", "contrasted"},
        {2, "structure", "serif", "semi-serif", "sans-serif"},
    }};
    using Maker = GlyphOutline (*)(const Pen&);
    const std::pair<const char*, Maker> makers[] = {
        {"i", detail::make_i}, {"l", detail::make_l}, {"n", detail::make_n},
        {"o", detail::make_o}, {"space", detail::make_space},
    };
    for (const auto& [name, make] : makers) {
        MasterSet set;
        for (int b = 0; b < kCornerCount; ++b) {
            set[b] = make(pen_for_corner(static_cast<CornerMask>(b)));
        }
        space.glyphs.emplace(name, std::move(set));
    }
    space.startCorners = {{{0, {"serif", "light"}}, {7, {"sans-serif", "bold"}}}};
    finalize_space(space);
    return space;
}

} // namespace inbetween::demo
