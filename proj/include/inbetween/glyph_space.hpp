#pragma once

// Three-axis parametric glyph space: corner masters, validation, and
// multilinear interpolation of interior instances.

#include "inbetween/error.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace inbetween {

/// Em units per em.
inline constexpr double kUnitsPerEm = 1000.0;
inline constexpr int kAxisCount = 3;
inline constexpr int kCornerCount = 8;
inline constexpr int kDocumentVersion = 1;

enum class NodeKind : std::uint8_t { OnCurve, OffCurve };

struct GlyphNode {
    double x = 0.0;
    double y = 0.0;
    NodeKind kind = NodeKind::OnCurve;

    bool operator==(const GlyphNode&) const = default;
};

struct Contour {
    std::vector<GlyphNode> nodes;
    bool closed = true;

    bool operator==(const Contour&) const = default;
};

struct GlyphOutline {
    std::string glyphName;
    double advanceWidth = 0.0;
    std::vector<Contour> contours;

    bool operator==(const GlyphOutline&) const = default;
};

struct AxisMeta {
    int index = 0;
    std::string name;
    std::string wordLow;
    std::string wordMid;
    std::string wordHigh;

    bool operator==(const AxisMeta&) const = default;
};

/// A point of the unit cube. Components are clamped to [0,1]; NaN is rejected.
class DesignCoords {
public:
    DesignCoords() = default;
    DesignCoords(double x, double y, double z) : c_{sanitize(x), sanitize(y), sanitize(z)} {}
    explicit DesignCoords(const std::array<double, 3>& c) : DesignCoords(c[0], c[1], c[2]) {}

    double operator[](std::size_t axis) const { return c_[axis]; }
    const std::array<double, 3>& values() const noexcept { return c_; }

    /// Copy with one component replaced (clamped like the constructor).
    DesignCoords with(std::size_t axis, double value) const {
        auto c = c_;
        c[axis] = value;
        return DesignCoords(c);
    }

    /// The antipode (1,1,1) - c.
    DesignCoords antipode() const { return {1.0 - c_[0], 1.0 - c_[1], 1.0 - c_[2]}; }

    bool operator==(const DesignCoords&) const = default;
    auto operator<=>(const DesignCoords&) const = default;

private:
    static double sanitize(double v) {
        if (std::isnan(v)) {
            throw Error(ErrorCode::InvalidCoords, "design coordinate is NaN");
        }
        return std::clamp(v, 0.0, 1.0);
    }

    std::array<double, 3> c_{0.0, 0.0, 0.0};
};

inline DesignCoords midpoint(const DesignCoords& a, const DesignCoords& b) {
    return {(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, (a[2] + b[2]) / 2.0};
}

inline double distance_linf(const DesignCoords& a, const DesignCoords& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

inline double distance_l2(const DesignCoords& a, const DesignCoords& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(s);
}

/// Corner bitmask: bit i set <=> axis i at 1.0.
using CornerMask = std::uint8_t;

inline DesignCoords corner_coords(CornerMask corner) {
    return {(corner & 1) ? 1.0 : 0.0, (corner & 2) ? 1.0 : 0.0, (corner & 4) ? 1.0 : 0.0};
}

/// Returns the corner bitmask if `c` is exactly a cube vertex.
inline std::optional<CornerMask> as_corner(const DesignCoords& c) {
    CornerMask mask = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        if (c[i] == 1.0) {
            mask = static_cast<CornerMask>(mask | (1u << i));
        } else if (c[i] != 0.0) {
            return std::nullopt;
        }
    }
    return mask;
}

struct StartCorner {
    CornerMask corner = 0;
    std::array<std::string, 2> labels;

    bool operator==(const StartCorner&) const = default;
};

using MasterSet = std::array<GlyphOutline, kCornerCount>;

struct DesignSpace {
    std::array<AxisMeta, kAxisCount> axes;
    std::map<std::string, MasterSet> glyphs;
    std::array<StartCorner, 2> startCorners;
    std::string spaceHash;
};

/// Multilinear corner weights: w_b(c) = prod_i (c_i if bit i of b else 1 - c_i).
inline std::array<double, kCornerCount> corner_weights(const DesignCoords& c) {
    std::array<double, kCornerCount> w{};
    for (int b = 0; b < kCornerCount; ++b) {
        double p = 1.0;
        for (int i = 0; i < kAxisCount; ++i) {
            p *= (b >> i & 1) ? c[i] : 1.0 - c[i];
        }
        w[b] = p;
    }
    return w;
}

// ---------------------------------------------------------------------------
// Outline validation
// ---------------------------------------------------------------------------

namespace detail {

/// Checks the line/cubic segment grammar. Returns an empty string when valid,
/// otherwise a description of the first violation.
inline std::string contour_grammar_error(const Contour& contour) {
    const auto& nodes = contour.nodes;
    const std::size_t n = nodes.size();
    if (n == 0) {
        return "empty contour";
    }
    auto first_on = std::find_if(nodes.begin(), nodes.end(),
                                 [](const GlyphNode& g) { return g.kind == NodeKind::OnCurve; });
    if (first_on == nodes.end()) {
        return "contour has no on-curve node";
    }
    if (!contour.closed &&
        (nodes.front().kind != NodeKind::OnCurve || nodes.back().kind != NodeKind::OnCurve)) {
        return "open contour must start and end on-curve";
    }
    for (const auto& g : nodes) {
        if (!std::isfinite(g.x) || !std::isfinite(g.y)) {
            return "non-finite node coordinate";
        }
    }
    const std::size_t start = static_cast<std::size_t>(first_on - nodes.begin());
    const std::size_t span = contour.closed ? n : n - start;
    int offs = 0;
    for (std::size_t k = 1; k <= span; ++k) {
        if (!contour.closed && start + k >= n) {
            break;
        }
        const auto& g = nodes[(start + k) % n];
        if (g.kind == NodeKind::OffCurve) {
            ++offs;
        } else {
            if (offs != 0 && offs != 2) {
                return "segment with " + std::to_string(offs) + " off-curve nodes";
            }
            offs = 0;
        }
    }
    if (offs != 0) {
        return "trailing off-curve nodes";
    }
    return {};
}

inline std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
}

} // namespace detail

inline void validate_outline(const GlyphOutline& outline) {
    for (std::size_t ci = 0; ci < outline.contours.size(); ++ci) {
        auto err = detail::contour_grammar_error(outline.contours[ci]);
        if (!err.empty()) {
            throw Error(ErrorCode::MalformedContour,
                        "glyph '" + outline.glyphName + "' contour " + std::to_string(ci) + ": " + err,
                        {{"glyph", outline.glyphName}, {"contour", ci}});
        }
    }
}

/// Throws PointIncompatible naming glyph, master, contour and node index of the
/// first structural difference from master 0.
inline void check_point_compatible(const std::string& name, const MasterSet& masters) {
    const auto& ref = masters[0];
    auto fail = [&](int master, std::size_t contour, std::size_t node, const std::string& what) {
        throw Error(ErrorCode::PointIncompatible,
                    "glyph '" + name + "' master " + std::to_string(master) + " contour " +
                        std::to_string(contour) + " node " + std::to_string(node) + ": " + what,
                    {{"glyph", name}, {"master", master}, {"contour", contour}, {"node", node}});
    };
    for (int b = 1; b < kCornerCount; ++b) {
        const auto& m = masters[b];
        if (m.contours.size() != ref.contours.size()) {
            fail(b, std::min(m.contours.size(), ref.contours.size()), 0, "contour count differs");
        }
        for (std::size_t ci = 0; ci < ref.contours.size(); ++ci) {
            const auto& a = ref.contours[ci];
            const auto& c = m.contours[ci];
            if (a.closed != c.closed) {
                fail(b, ci, 0, "closed flag differs");
            }
            const std::size_t common = std::min(a.nodes.size(), c.nodes.size());
            for (std::size_t ni = 0; ni < common; ++ni) {
                if (a.nodes[ni].kind != c.nodes[ni].kind) {
                    fail(b, ci, ni, "node kind differs");
                }
            }
            if (a.nodes.size() != c.nodes.size()) {
                fail(b, ci, common, "node count differs");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Space document (JSON)
// ---------------------------------------------------------------------------

inline nlohmann::json outline_to_json(const GlyphOutline& g) {
    nlohmann::json contours = nlohmann::json::array();
    for (const auto& c : g.contours) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : c.nodes) {
            nodes.push_back({{"x", n.x}, {"y", n.y}, {"kind", n.kind == NodeKind::OnCurve ? "on" : "off"}});
        }
        contours.push_back({{"closed", c.closed}, {"nodes", std::move(nodes)}});
    }
    return {{"advanceWidth", g.advanceWidth}, {"contours", std::move(contours)}};
}

inline GlyphOutline outline_from_json(const std::string& name, const nlohmann::json& j) {
    GlyphOutline g;
    g.glyphName = name;
    g.advanceWidth = j.at("advanceWidth").get<double>();
    for (const auto& jc : j.at("contours")) {
        Contour c;
        c.closed = jc.at("closed").get<bool>();
        for (const auto& jn : jc.at("nodes")) {
            const auto kind = jn.at("kind").get<std::string>();
            if (kind != "on" && kind != "off") {
                throw Error(ErrorCode::MalformedDocument, "node kind must be 'on' or 'off'");
            }
            c.nodes.push_back({jn.at("x").get<double>(), jn.at("y").get<double>(),
                               kind == "on" ? NodeKind::OnCurve : NodeKind::OffCurve});
        }
        g.contours.push_back(std::move(c));
    }
    return g;
}

/// Serializes the space as a document. The hash is not part of the document.
inline nlohmann::json to_document(const DesignSpace& space) {
    nlohmann::json doc;
    doc["v"] = kDocumentVersion;
    doc["axes"] = nlohmann::json::array();
    for (const auto& a : space.axes) {
        doc["axes"].push_back({{"name", a.name}, {"low", a.wordLow}, {"mid", a.wordMid}, {"high", a.wordHigh}});
    }
    doc["glyphs"] = nlohmann::json::object();
    for (const auto& [name, masters] : space.glyphs) {
        auto& arr = doc["glyphs"][name] = nlohmann::json::array();
        for (const auto& m : masters) {
            arr.push_back(outline_to_json(m));
        }
    }
    doc["startCorners"] = nlohmann::json::array();
    for (const auto& s : space.startCorners) {
        doc["startCorners"].push_back({{"corner", s.corner}, {"labels", s.labels}});
    }
    return doc;
}

/// Content digest over the canonical (sorted-key, compact) document text.
inline std::string compute_space_hash(const DesignSpace& space) {
    return detail::sha256_hex(to_document(space).dump());
}

/// Validates structure and fills in the hash.
inline void finalize_space(DesignSpace& space) {
    for (int i = 0; i < kAxisCount; ++i) {
        const auto& a = space.axes[i];
        if (a.wordLow == a.wordMid || a.wordMid == a.wordHigh || a.wordLow == a.wordHigh) {
            throw Error(ErrorCode::MalformedDocument, "axis " + std::to_string(i) + " words must be distinct");
        }
    }
    if (space.glyphs.empty()) {
        throw Error(ErrorCode::MalformedDocument, "space has no glyphs");
    }
    for (const auto& [name, masters] : space.glyphs) {
        for (const auto& m : masters) {
            validate_outline(m);
        }
        check_point_compatible(name, masters);
    }
    const auto& sc = space.startCorners;
    if (sc[0].corner > 7 || sc[1].corner > 7 || (sc[0].corner ^ sc[1].corner) != 7) {
        throw Error(ErrorCode::NonAntipodalStart,
                    "start corners " + std::to_string(sc[0].corner) + " and " + std::to_string(sc[1].corner) +
                        " are not antipodal",
                    {{"corners", {sc[0].corner, sc[1].corner}}});
    }
    space.spaceHash = compute_space_hash(space);
}

inline DesignSpace load_space(const nlohmann::json& doc) {
    DesignSpace space;
    try {
        const auto& axes = doc.at("axes");
        if (!axes.is_array() || axes.size() != kAxisCount) {
            throw Error(ErrorCode::MalformedDocument, "space must have exactly 3 axes");
        }
        for (int i = 0; i < kAxisCount; ++i) {
            const auto& a = axes[i];
            space.axes[i] = {i, a.at("name").get<std::string>(), a.at("low").get<std::string>(),
                             a.at("mid").get<std::string>(), a.at("high").get<std::string>()};
        }
        const auto& glyphs = doc.at("glyphs");
        if (!glyphs.is_object()) {
            throw Error(ErrorCode::MalformedDocument, "glyphs must be an object");
        }
        for (const auto& [name, masters] : glyphs.items()) {
            if (!masters.is_array() || masters.size() != kCornerCount) {
                throw Error(ErrorCode::MalformedDocument, "glyph '" + name + "' needs exactly 8 masters",
                            {{"glyph", name}});
            }
            MasterSet set;
            for (int b = 0; b < kCornerCount; ++b) {
                set[b] = outline_from_json(name, masters[b]);
            }
            space.glyphs.emplace(name, std::move(set));
        }
        const auto& starts = doc.at("startCorners");
        if (!starts.is_array() || starts.size() != 2) {
            throw Error(ErrorCode::MalformedDocument, "startCorners must have 2 entries");
        }
        for (int k = 0; k < 2; ++k) {
            const int corner = starts[k].at("corner").get<int>();
            if (corner < 0 || corner > 7) {
                throw Error(ErrorCode::MalformedDocument, "start corner out of range");
            }
            space.startCorners[k].corner = static_cast<CornerMask>(corner);
            space.startCorners[k].labels = starts[k].at("labels").get<std::array<std::string, 2>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedDocument, std::string("malformed space document: ") + e.what());
    }
    finalize_space(space);
    return space;
}

inline DesignSpace load_space_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedDocument, std::string("space document does not parse: ") + e.what());
    }
    return load_space(doc);
}

inline DesignSpace load_space_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open space document '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return load_space_text(ss.str());
}

// ---------------------------------------------------------------------------
// Interpolation
// ---------------------------------------------------------------------------

inline const MasterSet& masters_of(const DesignSpace& space, const std::string& glyphName) {
    auto it = space.glyphs.find(glyphName);
    if (it == space.glyphs.end()) {
        throw Error(ErrorCode::UnknownGlyph, "unknown glyph '" + glyphName + "'", {{"glyph", glyphName}});
    }
    return it->second;
}

/// Node-wise multilinear blend of the 8 corner masters.
inline GlyphOutline interpolate_glyph(const DesignSpace& space, const std::string& glyphName,
                                      const DesignCoords& coords) {
    const auto& masters = masters_of(space, glyphName);
    const auto w = corner_weights(coords);

    GlyphOutline out = masters[0];
    out.advanceWidth = 0.0;
    for (int b = 0; b < kCornerCount; ++b) {
        out.advanceWidth += w[b] * masters[b].advanceWidth;
    }
    for (std::size_t ci = 0; ci < out.contours.size(); ++ci) {
        auto& nodes = out.contours[ci].nodes;
        for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
            double x = 0.0;
            double y = 0.0;
            for (int b = 0; b < kCornerCount; ++b) {
                const auto& p = masters[b].contours[ci].nodes[ni];
                x += w[b] * p.x;
                y += w[b] * p.y;
            }
            nodes[ni].x = x;
            nodes[ni].y = y;
        }
    }
    return out;
}

/// Per-axis word: low below 1/3, high above 2/3, mid otherwise (edges inclusive to mid).
inline std::array<std::string, 3> descriptor_words(const DesignSpace& space, const DesignCoords& coords) {
    std::array<std::string, 3> words;
    for (int i = 0; i < kAxisCount; ++i) {
        const auto& a = space.axes[i];
        const double v = coords[i];
        words[i] = v < 1.0 / 3.0 ? a.wordLow : (v > 2.0 / 3.0 ? a.wordHigh : a.wordMid);
    }
    return words;
}

} // namespace inbetween
