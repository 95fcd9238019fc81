#pragma once

// SVG 1.1 output: glyph outlines, example text, specimen sheets and
// selection-pattern overlays. Numbers are written with 6 fractional digits so
// that output is byte-stable.

#include "inbetween/catalog_engine.hpp"
#include "inbetween/glyph_space.hpp"
#include "inbetween/hex_projection.hpp"
#include "inbetween/trace_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace inbetween::svg {

struct Palette {
    std::string ink = "#000000";
    std::string paper = "#ffffff";
    std::string outerHex = "#fbd3a4";     // light orange
    std::string areaLevel1 = "#a8dc9a";   // light green
    std::string areaDeep = "#4a2a6a";     // dark purple, levels 2-3
    std::string path = "#5a5a5a";
    std::string dot = "#000000";
    std::string placeholder = "#c0392b";
};

inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s(buf);
    if (s == "-0.000000") {
        s = "0.000000";
    }
    return s;
}

inline std::string escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string document_open(double width, double height) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           num(width) + "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
}

inline constexpr const char* kDocumentClose = "</svg>\n";

/// Maps em units to the page.
struct Placement {
    double originX = 0.0;
    double baselineY = 0.0;
    double scale = 1.0;

    double x(double ex) const { return originX + ex * scale; }
    double y(double ey) const { return baselineY - ey * scale; }
};

/// Path data for one contour. Lines become L, cubic segments C.
inline std::string contour_path_data(const Contour& contour, const Placement& at) {
    const auto& nodes = contour.nodes;
    const std::size_t n = nodes.size();
    std::size_t start = 0;
    while (start < n && nodes[start].kind != NodeKind::OnCurve) {
        ++start;
    }
    if (start == n) {
        throw Error(ErrorCode::MalformedContour, "contour has no on-curve node");
    }
    auto pt = [&](const GlyphNode& g) { return num(at.x(g.x)) + " " + num(at.y(g.y)); };
    std::string d = "M " + pt(nodes[start]);
    std::vector<const GlyphNode*> offs;
    const std::size_t steps = contour.closed ? n : n - 1 - start;
    for (std::size_t k = 1; k <= steps; ++k) {
        const auto& g = nodes[(start + k) % n];
        if (g.kind == NodeKind::OffCurve) {
            offs.push_back(&g);
            continue;
        }
        if (offs.empty()) {
            d += " L " + pt(g);
        } else if (offs.size() == 2) {
            d += " C " + pt(*offs[0]) + " " + pt(*offs[1]) + " " + pt(g);
        } else {
            throw Error(ErrorCode::MalformedContour, "segment with " + std::to_string(offs.size()) + " off-curve nodes");
        }
        offs.clear();
    }
    if (!offs.empty()) {
        throw Error(ErrorCode::MalformedContour, "trailing off-curve nodes");
    }
    if (contour.closed) {
        d += " Z";
    }
    return d;
}

/// Shoelace area over all nodes; positive for counter-clockwise (y up).
inline double signed_area(const Contour& c) {
    double a = 0.0;
    const std::size_t n = c.nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = c.nodes[i];
        const auto& q = c.nodes[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return a / 2.0;
}

/// One path element per contour. Outer (counter-clockwise) contours are filled
/// with ink, counters with paper.
inline std::string glyph_svg(const GlyphOutline& outline, double sizePx, const Palette& palette = {}) {
    validate_outline(outline);
    const double scale = sizePx / kUnitsPerEm;
    const double width = outline.advanceWidth * scale;
    const double height = sizePx;
    const Placement at{0.0, height, scale};
    std::string out = document_open(width, height);
    for (const auto& c : outline.contours) {
        const bool counter = c.closed && signed_area(c) < 0.0;
        out += "<path class=\"" + std::string(counter ? "counter" : "ink") + "\" fill=\"" +
               (counter ? palette.paper : palette.ink) + "\" d=\"" + contour_path_data(c, at) + "\"/>\n";
    }
    out += kDocumentClose;
    return out;
}

// ---------------------------------------------------------------------------
// Example text
// ---------------------------------------------------------------------------

inline constexpr double kPlaceholderAdvance = 500.0;

struct TextLayout {
    std::string svg;
    std::vector<std::string> warnings;
    /// Page x of each laid-out glyph, per line.
    std::vector<std::vector<double>> glyphX;
    /// Line widths in px: glyph advances plus letter spacing between glyphs.
    std::vector<double> lineWidths;
};

/// Splits UTF-8 text into code point strings.
inline std::vector<std::string> utf8_chars(std::string_view text) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < text.size();) {
        const auto lead = static_cast<unsigned char>(text[i]);
        std::size_t len = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xe ? 3 : (lead >> 3) == 0x1e ? 4 : 1;
        len = std::min(len, text.size() - i);
        out.emplace_back(text.substr(i, len));
        i += len;
    }
    return out;
}

inline TextLayout text_svg(const DesignSpace& space, const DesignCoords& coords, std::string_view text, double sizePx,
                           double letterSpacing, double lineSpacing, const Palette& palette = {}) {
    const double scale = sizePx / kUnitsPerEm;
    TextLayout layout;
    std::string body;
    std::map<std::string, GlyphOutline> cache;
    double x = 0.0;
    double baseline = sizePx;
    bool lineStart = true;
    layout.glyphX.emplace_back();
    layout.lineWidths.push_back(0.0);

    for (const auto& ch : utf8_chars(text)) {
        if (ch == "\n") {
            layout.lineWidths.back() = x;
            layout.glyphX.emplace_back();
            layout.lineWidths.push_back(0.0);
            x = 0.0;
            baseline += lineSpacing;
            lineStart = true;
            continue;
        }
        if (!lineStart) {
            x += letterSpacing;
        }
        lineStart = false;
        const std::string name = ch == " " ? "space" : ch;
        layout.glyphX.back().push_back(x);
        if (!space.glyphs.count(name)) {
            layout.warnings.push_back("missing glyph '" + name + "'");
            const Placement at{x, baseline, scale};
            body += "<rect class=\"placeholder\" fill=\"none\" stroke=\"" + palette.placeholder + "\" x=\"" +
                    num(at.x(50.0)) + "\" y=\"" + num(at.y(700.0)) + "\" width=\"" + num(400.0 * scale) +
                    "\" height=\"" + num(700.0 * scale) + "\"/>\n";
            x += kPlaceholderAdvance * scale;
            continue;
        }
        auto it = cache.find(name);
        if (it == cache.end()) {
            it = cache.emplace(name, interpolate_glyph(space, name, coords)).first;
        }
        const auto& g = it->second;
        if (!g.contours.empty()) {
            const Placement at{x, baseline, scale};
            std::string d;
            for (const auto& c : g.contours) {
                d += (d.empty() ? "" : " ") + contour_path_data(c, at);
            }
            body += "<path class=\"glyph\" data-glyph=\"" + escape(name) + "\" fill=\"" + palette.ink + "\" d=\"" + d +
                    "\"/>\n";
        }
        x += g.advanceWidth * scale;
    }
    layout.lineWidths.back() = x;

    const double width = *std::max_element(layout.lineWidths.begin(), layout.lineWidths.end());
    const double height = baseline + sizePx * 0.25;
    std::string out = document_open(width, height);
    if (!layout.warnings.empty()) {
        out += "<metadata>";
        for (std::size_t i = 0; i < layout.warnings.size(); ++i) {
            out += (i ? "; " : "") + escape(layout.warnings[i]);
        }
        out += "</metadata>\n";
    }
    out += body;
    out += kDocumentClose;
    layout.svg = std::move(out);
    return layout;
}

// ---------------------------------------------------------------------------
// Specimen sheet
// ---------------------------------------------------------------------------

inline std::string format_coords(const DesignCoords& c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f, %.3f, %.3f", c[0], c[1], c[2]);
    return buf;
}

/// Lattice coordinates with the given step, axis 0 varying fastest.
inline std::vector<DesignCoords> lattice(double step) {
    const int n = static_cast<int>(std::lround(1.0 / step));
    std::vector<DesignCoords> out;
    for (int k = 0; k <= n; ++k) {
        for (int j = 0; j <= n; ++j) {
            for (int i = 0; i <= n; ++i) {
                out.emplace_back(i * step, j * step, k * step);
            }
        }
    }
    return out;
}

inline std::string specimen_sheet(const DesignSpace& space, const std::vector<std::string>& glyphNames,
                                  double latticeStep, const Palette& palette = {}) {
    if (latticeStep != 1.0 && latticeStep != 0.5 && latticeStep != 0.25) {
        throw Error(ErrorCode::ValueOutOfRange, "lattice step must be 1, 0.5 or 0.25", {{"step", latticeStep}});
    }
    for (const auto& g : glyphNames) {
        (void)masters_of(space, g);
    }
    const int perAxis = static_cast<int>(std::lround(1.0 / latticeStep)) + 1;
    const int columns = perAxis * perAxis;
    const double cell = 120.0;
    const double glyphPx = 64.0;
    const auto coords = lattice(latticeStep);
    const int rowsPerGlyph = perAxis;
    const double width = columns * cell;
    const double height = static_cast<double>(glyphNames.size() * rowsPerGlyph) * cell;

    std::string out = document_open(width, height);
    for (std::size_t gi = 0; gi < glyphNames.size(); ++gi) {
        const auto& name = glyphNames[gi];
        for (std::size_t ci = 0; ci < coords.size(); ++ci) {
            const auto& c = coords[ci];
            const double cx = static_cast<double>(ci % columns) * cell;
            const double cy = static_cast<double>(gi * rowsPerGlyph + ci / columns) * cell;
            const auto outline = interpolate_glyph(space, name, c);
            const auto words = descriptor_words(space, c);
            out += "<g class=\"specimen-cell\" data-glyph=\"" + escape(name) + "\" data-coords=\"" +
                   escape(format_coords(c)) + "\">\n";
            const Placement at{cx + 10.0, cy + 10.0 + glyphPx, glyphPx / kUnitsPerEm};
            std::string d;
            for (const auto& contour : outline.contours) {
                d += (d.empty() ? "" : " ") + contour_path_data(contour, at);
            }
            if (!d.empty()) {
                out += "<path fill=\"" + palette.ink + "\" d=\"" + d + "\"/>\n";
            }
            out += "<text class=\"coords\" x=\"" + num(cx + 6.0) + "\" y=\"" + num(cy + cell - 22.0) +
                   "\" font-size=\"9\">" + escape(format_coords(c)) + "</text>\n";
            out += "<text class=\"descriptor\" x=\"" + num(cx + 6.0) + "\" y=\"" + num(cy + cell - 10.0) +
                   "\" font-size=\"9\">" + escape(words[0] + " " + words[1] + " " + words[2]) + "</text>\n";
            out += "</g>\n";
        }
    }
    out += kDocumentClose;
    return out;
}

// ---------------------------------------------------------------------------
// Selection-pattern overlays
// ---------------------------------------------------------------------------

struct OverlayArea {
    HexPoint center;
    double radius = 0.0;
    int level = 1;
};

struct OverlayModel {
    double outerHexRadius = 1.0;
    std::vector<OverlayArea> areas;
    std::vector<HexPoint> path;
    std::vector<HexPoint> pointsOfInterest;
    HexPoint startDot;
    HexPoint endDot;
};

/// Hexagon with vertices at angles 0, 60, ..., 300 degrees: the image of the cube.
inline std::array<HexPoint, 6> hexagon(HexPoint center, double radius) {
    std::array<HexPoint, 6> v;
    for (int i = 0; i < 6; ++i) {
        const double a = i * 3.14159265358979323846 / 3.0;
        v[i] = {center.u + radius * std::cos(a), center.v + radius * std::sin(a)};
    }
    return v;
}

/// Largest t <= 1 keeping t*p inside the hexagon of radius R around the origin.
inline HexPoint clamp_to_hexagon(HexPoint p, double radius) {
    // Support function of the hexagon: max over the three edge normals.
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double a = (2 * i + 1) * 3.14159265358979323846 / 6.0;
        worst = std::max(worst, std::abs(p.u * std::cos(a) + p.v * std::sin(a)));
    }
    const double apothem = radius * kSqrt3Over2;
    if (worst <= apothem) {
        return p;
    }
    return (apothem / worst) * p;
}

/// Overlay of one inbetween trace: areas are the exact hexagonal images of the
/// L-inf interest cubes (circumradius 2 * halfWidth), scaled to `outerRadius`.
inline OverlayModel build_overlay(const SessionTrace& trace, double outerRadius) {
    OverlayModel m;
    m.outerHexRadius = outerRadius;
    auto place = [&](const DesignCoords& c) { return clamp_to_hexagon(outerRadius * project(c), outerRadius); };
    int level = 0;
    for (const auto& e : trace.events) {
        if (e.kind == EventKind::CategorySelect || e.kind == EventKind::Reset) {
            level = 0;
        } else if (e.kind == EventKind::ZoomIn) {
            ++level;
            m.areas.push_back({place(e.coords()), 2.0 * level_step(level) * outerRadius, level});
        }
    }
    const auto path = exploration_path(trace);
    for (const auto& c : path) {
        m.path.push_back(place(c));
    }
    for (const auto& c : points_of_interest(trace)) {
        m.pointsOfInterest.push_back(place(c));
    }
    if (!path.empty()) {
        m.startDot = m.path.front();
        m.endDot = m.path.back();
    }
    return m;
}

namespace detail {

inline std::string polygon_points(const std::array<HexPoint, 6>& v, double ox, double oy) {
    std::string s;
    for (const auto& p : v) {
        s += (s.empty() ? "" : " ") + num(ox + p.u) + "," + num(oy - p.v);
    }
    return s;
}

/// Overlay elements centered at page position (ox, oy); v axis points up.
inline std::string overlay_body(const OverlayModel& m, double ox, double oy, const Palette& palette,
                                double areaOpacity = 1.0, bool withPath = true) {
    std::string out;
    out += "<polygon class=\"design-space\" fill=\"" + palette.outerHex + "\" points=\"" +
           polygon_points(hexagon({0.0, 0.0}, m.outerHexRadius), ox, oy) + "\"/>\n";
    std::vector<OverlayArea> areas = m.areas;
    std::stable_sort(areas.begin(), areas.end(), [](const auto& a, const auto& b) { return a.level < b.level; });
    for (const auto& a : areas) {
        out += "<polygon class=\"area level" + std::to_string(a.level) + "\" fill=\"" +
               (a.level <= 1 ? palette.areaLevel1 : palette.areaDeep) + "\"";
        if (areaOpacity < 1.0) {
            out += " fill-opacity=\"" + num(areaOpacity) + "\"";
        }
        out += " points=\"" + polygon_points(hexagon(a.center, a.radius), ox, oy) + "\"/>\n";
    }
    if (!withPath) {
        return out;
    }
    if (m.path.size() >= 2) {
        std::string pts;
        for (const auto& p : m.path) {
            pts += (pts.empty() ? "" : " ") + num(ox + p.u) + "," + num(oy - p.v);
        }
        out += "<polyline class=\"path\" fill=\"none\" stroke=\"" + palette.path + "\" stroke-width=\"" +
               num(m.outerHexRadius * 0.02) + "\" points=\"" + pts + "\"/>\n";
    }
    for (const auto& p : m.pointsOfInterest) {
        out += "<circle class=\"poi\" fill=\"" + palette.dot + "\" cx=\"" + num(ox + p.u) + "\" cy=\"" +
               num(oy - p.v) + "\" r=\"" + num(m.outerHexRadius * 0.025) + "\"/>\n";
    }
    for (const auto& [cls, p] : {std::pair{"start", m.startDot}, std::pair{"end", m.endDot}}) {
        out += "<circle class=\"" + std::string(cls) + "\" fill=\"" + palette.dot + "\" cx=\"" + num(ox + p.u) +
               "\" cy=\"" + num(oy - p.v) + "\" r=\"" + num(m.outerHexRadius * 0.06) + "\"/>\n";
    }
    return out;
}

/// Orders ids like U2 before U10.
inline bool natural_less(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) {
        return a.size() < b.size();
    }
    return a < b;
}

} // namespace detail

inline std::string overlay_svg(const OverlayModel& model, const Palette& palette = {}) {
    const double margin = model.outerHexRadius * 0.1;
    const double size = 2.0 * (model.outerHexRadius + margin);
    std::string out = document_open(size, size);
    out += detail::overlay_body(model, size / 2.0, size / 2.0, palette);
    out += kDocumentClose;
    return out;
}

struct GridLayout {
    std::vector<std::string> users;  // columns
    std::vector<std::string> tasks;  // rows
};

/// Users x tasks grid of overlays with a right margin of per-task aggregates and
/// a bottom margin of per-user aggregates. Missing cells show the bare space.
inline std::string overlay_grid(std::span<const SessionTrace> traces, double cellRadius = 40.0,
                                GridLayout* layoutOut = nullptr, const Palette& palette = {}) {
    std::map<std::pair<std::string, std::string>, std::vector<const SessionTrace*>> byCell;
    std::vector<std::string> users;
    std::vector<std::string> tasks;
    for (const auto& t : traces) {
        if (t.interfaceKind != InterfaceKind::Inbetween) {
            continue;
        }
        byCell[{t.userId, t.taskId}].push_back(&t);
        if (std::find(users.begin(), users.end(), t.userId) == users.end()) {
            users.push_back(t.userId);
        }
        if (std::find(tasks.begin(), tasks.end(), t.taskId) == tasks.end()) {
            tasks.push_back(t.taskId);
        }
    }
    std::sort(users.begin(), users.end(), detail::natural_less);
    std::sort(tasks.begin(), tasks.end(), detail::natural_less);
    for (auto& [key, list] : byCell) {
        std::sort(list.begin(), list.end(),
                  [](const SessionTrace* a, const SessionTrace* b) { return a->sessionId < b->sessionId; });
    }

    const double pitch = 2.0 * cellRadius * 1.15;
    const double width = pitch * static_cast<double>(users.size() + 1);
    const double height = pitch * static_cast<double>(tasks.size() + 1);
    std::string out = document_open(width, height);
    auto origin = [&](std::size_t col, std::size_t row) {
        return std::pair{pitch * (static_cast<double>(col) + 0.5), pitch * (static_cast<double>(row) + 0.5)};
    };
    const double aggregateOpacity = 0.35;

    for (std::size_t r = 0; r < tasks.size(); ++r) {
        for (std::size_t c = 0; c < users.size(); ++c) {
            const auto [ox, oy] = origin(c, r);
            out += "<g class=\"cell\" data-user=\"" + escape(users[c]) + "\" data-task=\"" + escape(tasks[r]) + "\">\n";
            auto it = byCell.find({users[c], tasks[r]});
            if (it == byCell.end()) {
                OverlayModel empty;
                empty.outerHexRadius = cellRadius;
                out += detail::overlay_body(empty, ox, oy, palette, 1.0, false);
            } else {
                for (const auto* t : it->second) {
                    out += detail::overlay_body(build_overlay(*t, cellRadius), ox, oy, palette);
                }
            }
            out += "</g>\n";
        }
    }
    auto aggregate = [&](const std::vector<const SessionTrace*>& members) {
        OverlayModel agg;
        agg.outerHexRadius = cellRadius;
        for (const auto* t : members) {
            auto m = build_overlay(*t, cellRadius);
            agg.areas.insert(agg.areas.end(), m.areas.begin(), m.areas.end());
        }
        return agg;
    };
    for (std::size_t r = 0; r < tasks.size(); ++r) {
        std::vector<const SessionTrace*> members;
        for (const auto& u : users) {
            if (auto it = byCell.find({u, tasks[r]}); it != byCell.end()) {
                members.insert(members.end(), it->second.begin(), it->second.end());
            }
        }
        const auto [ox, oy] = origin(users.size(), r);
        out += "<g class=\"task-aggregate\" data-task=\"" + escape(tasks[r]) + "\">\n";
        out += detail::overlay_body(aggregate(members), ox, oy, palette, aggregateOpacity, false);
        out += "</g>\n";
    }
    for (std::size_t c = 0; c < users.size(); ++c) {
        std::vector<const SessionTrace*> members;
        for (const auto& t : tasks) {
            if (auto it = byCell.find({users[c], t}); it != byCell.end()) {
                members.insert(members.end(), it->second.begin(), it->second.end());
            }
        }
        const auto [ox, oy] = origin(c, tasks.size());
        out += "<g class=\"user-aggregate\" data-user=\"" + escape(users[c]) + "\">\n";
        out += detail::overlay_body(aggregate(members), ox, oy, palette, aggregateOpacity, false);
        out += "</g>\n";
    }
    out += kDocumentClose;
    if (layoutOut) {
        *layoutOut = {users, tasks};
    }
    return out;
}

} // namespace inbetween::svg
