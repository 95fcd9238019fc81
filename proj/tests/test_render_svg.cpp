#include "support.hpp"

#include <gtest/gtest.h>

#include <regex>

using namespace inbetween;
using testing_support::count_substr;
using testing_support::demo_space;
using testing_support::TraceScript;
using testing_support::well_formed_xml;

namespace {

/// Extracts every numeric attribute value `name="..."` from `svg`.
std::vector<double> attribute_values(const std::string& svg, const std::string& name) {
    std::vector<double> out;
    const std::regex re(" " + name + "=\"([-0-9.]+)\"");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
        out.push_back(std::stod((*it)[1]));
    }
    return out;
}

SessionTrace nested_zoom_trace() {
    return TraceScript()
        .add(EventKind::CategorySelect, DesignCoords(0, 0, 0))
        .add(EventKind::ZoomIn, DesignCoords(0, 0, 0))
        .add(EventKind::ZoomIn, DesignCoords(0.5, 0, 0))
        .add(EventKind::Click, DesignCoords(0.5, 0.25, 0))
        .add(EventKind::Download, DesignCoords(0.5, 0.25, 0))
        .trace();
}

} // namespace

TEST(GlyphSvg, UnitSquareMatchesGolden) {
    const auto svg = svg::glyph_svg(testing_support::unit_square(), 100.0);
    EXPECT_EQ(svg, testing_support::read_file(std::filesystem::path(INBETWEEN_GOLDEN_DIR) / "unit_square.svg"));
    EXPECT_EQ(count_substr(svg, "<path"), 1u);
    EXPECT_EQ(count_substr(svg, " L "), 4u);
    EXPECT_EQ(count_substr(svg, " Z"), 1u);
    EXPECT_TRUE(well_formed_xml(svg));
}

TEST(GlyphSvg, EmptyOutlineIsAnEmptyDrawing) {
    GlyphOutline g;
    g.glyphName = "empty";
    g.advanceWidth = 250.0;
    const auto svg = svg::glyph_svg(g, 100.0);
    EXPECT_EQ(count_substr(svg, "<path"), 0u);
    EXPECT_NE(svg.find("width=\"25.000000\""), std::string::npos);
    EXPECT_TRUE(well_formed_xml(svg));
}

TEST(GlyphSvg, CubicSegmentsAndCounters) {
    const auto o = interpolate_glyph(demo_space(), "o", {0.5, 0.5, 0.5});
    const auto svg = svg::glyph_svg(o, 200.0);
    EXPECT_EQ(count_substr(svg, "<path"), o.contours.size());
    EXPECT_GT(count_substr(svg, " C "), 0u);
    EXPECT_EQ(count_substr(svg, "class=\"counter\""), 1u);
    EXPECT_TRUE(well_formed_xml(svg));
}

TEST(GlyphSvg, YAxisIsFlipped) {
    // Baseline y = 0 maps to the bottom of the 100 px box, cap y = 1000 to the top.
    const auto svg = svg::glyph_svg(testing_support::unit_square(), 100.0);
    EXPECT_EQ(svg.find("M 0.000000 100.000000 L 100.000000 100.000000 L 100.000000 0.000000"),
              svg.find("M "));
}

TEST(GlyphSvg, MalformedContourRejected) {
    auto g = testing_support::unit_square();
    g.contours[0].nodes[0].kind = NodeKind::OffCurve;
    EXPECT_THROW(svg::glyph_svg(g, 100.0), Error);
}

TEST(GlyphSvg, Deterministic) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
        const auto c = testing_support::random_coords(rng);
        for (const char* name : {"i", "l", "n", "o"}) {
            const auto g = interpolate_glyph(demo_space(), name, c);
            EXPECT_EQ(svg::glyph_svg(g, 120.0), svg::glyph_svg(g, 120.0));
        }
    }
}

TEST(TextSvg, SecondGlyphOffsetIsFirstAdvance) {
    const DesignCoords c(0.25, 0.5, 0.75);
    const auto layout = svg::text_svg(demo_space(), c, "no", 200.0, 0.0, 240.0);
    const double adv = interpolate_glyph(demo_space(), "n", c).advanceWidth;
    ASSERT_EQ(layout.glyphX.size(), 1u);
    ASSERT_EQ(layout.glyphX[0].size(), 2u);
    EXPECT_NEAR(layout.glyphX[0][1], adv * 200.0 / 1000.0, 1e-9);
    EXPECT_TRUE(layout.warnings.empty());
    EXPECT_TRUE(well_formed_xml(layout.svg));
}

TEST(TextSvg, UnknownCharacterGetsPlaceholder) {
    const auto layout = svg::text_svg(demo_space(), {0.5, 0.5, 0.5}, "noqn", 100.0, 0.0, 120.0);
    ASSERT_EQ(layout.warnings.size(), 1u);
    EXPECT_EQ(count_substr(layout.svg, "class=\"placeholder\""), 1u);
    EXPECT_NE(layout.svg.find("<metadata>"), std::string::npos);
    EXPECT_NE(layout.svg.find("missing glyph &apos;q&apos;"), std::string::npos);
    EXPECT_TRUE(well_formed_xml(layout.svg));
}

TEST(TextSvg, LetterSpacingAddsPerGap) {
    const DesignCoords c(0.5, 0.5, 0.5);
    const auto tight = svg::text_svg(demo_space(), c, "lion", 100.0, 0.0, 120.0);
    const auto loose = svg::text_svg(demo_space(), c, "lion", 100.0, 10.0, 120.0);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(loose.glyphX[0][i] - tight.glyphX[0][i], 10.0 * static_cast<double>(i), 1e-9);
    }
    EXPECT_NEAR(loose.lineWidths[0] - tight.lineWidths[0], 30.0, 1e-9);
}

TEST(TextSvg, NewlineAdvancesBaseline) {
    const auto layout = svg::text_svg(demo_space(), {0, 0, 0}, "no\non", 100.0, 0.0, 130.0);
    ASSERT_EQ(layout.glyphX.size(), 2u);
    EXPECT_EQ(layout.glyphX[1][0], 0.0);
    const auto heights = attribute_values(layout.svg, "height");
    ASSERT_FALSE(heights.empty());
    EXPECT_NEAR(heights[0], 100.0 + 130.0 + 25.0, 1e-9);
}

TEST(TextSvgProperty, TotalAdvanceIsAnalyticSum) {
    std::mt19937_64 rng(31);
    const std::string alphabet = "ilno ";
    std::uniform_real_distribution<double> u(0.0, 30.0);
    for (int i = 0; i < 200; ++i) {
        const auto c = testing_support::random_coords(rng);
        std::string text;
        const auto len = 1 + rng() % 12;
        for (std::size_t k = 0; k < len; ++k) {
            text += alphabet[rng() % alphabet.size()];
        }
        const double size = 20.0 + static_cast<double>(rng() % 200);
        const double ls = u(rng);
        double expected = ls * static_cast<double>(len - 1);
        for (char ch : text) {
            expected += interpolate_glyph(demo_space(), ch == ' ' ? "space" : std::string(1, ch), c).advanceWidth *
                        size / 1000.0;
        }
        const auto layout = svg::text_svg(demo_space(), c, text, size, ls, size * 1.2);
        EXPECT_NEAR(layout.lineWidths[0], expected, 1e-9) << text;
    }
}

TEST(SpecimenSheet, CellCountsFollowTheLattice) {
    const auto corners = svg::specimen_sheet(demo_space(), {"o"}, 1.0);
    EXPECT_EQ(count_substr(corners, "class=\"specimen-cell\""), 8u);
    const auto halves = svg::specimen_sheet(demo_space(), {"o"}, 0.5);
    EXPECT_EQ(count_substr(halves, "class=\"specimen-cell\""), 27u);
    const auto two = svg::specimen_sheet(demo_space(), {"n", "o"}, 0.25);
    EXPECT_EQ(count_substr(two, "class=\"specimen-cell\""), 2u * 125u);
    EXPECT_TRUE(well_formed_xml(corners));
    EXPECT_TRUE(well_formed_xml(two));
}

TEST(SpecimenSheet, AnnotationsAreDescriptorWords) {
    const auto sheet = svg::specimen_sheet(demo_space(), {"n"}, 0.5);
    int cells = 0;
    for (auto pos = sheet.find("data-coords=\""); pos != std::string::npos;
         pos = sheet.find("data-coords=\"", pos + 1)) {
        double x = 0;
        double y = 0;
        double z = 0;
        ASSERT_EQ(std::sscanf(sheet.c_str() + pos, "data-coords=\"%lf, %lf, %lf\"", &x, &y, &z), 3);
        const auto tag = sheet.find("<text class=\"descriptor\"", pos);
        const auto open = sheet.find('>', tag) + 1;
        const auto words = sheet.substr(open, sheet.find('<', open) - open);
        const auto w = descriptor_words(demo_space(), {x, y, z});
        EXPECT_EQ(words, w[0] + " " + w[1] + " " + w[2]);
        ++cells;
    }
    EXPECT_EQ(cells, 27);
}

TEST(SpecimenSheet, Errors) {
    try {
        svg::specimen_sheet(demo_space(), {"o"}, 0.3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ValueOutOfRange);
    }
    try {
        svg::specimen_sheet(demo_space(), {"o", "aleph"}, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownGlyph);
    }
}

TEST(Overlay, NoAreasIsHexagonAndDots) {
    const auto t = TraceScript()
                       .add(EventKind::CategorySelect, DesignCoords(0, 0, 0))
                       .add(EventKind::Click, DesignCoords(1, 0, 0))
                       .add(EventKind::Download, DesignCoords(1, 0, 0))
                       .trace();
    const auto model = svg::build_overlay(t, 100.0);
    EXPECT_TRUE(model.areas.empty());
    const auto doc = svg::overlay_svg(model);
    EXPECT_EQ(count_substr(doc, "<polygon"), 1u);
    EXPECT_EQ(count_substr(doc, "class=\"design-space\""), 1u);
    EXPECT_EQ(count_substr(doc, "class=\"start\""), 1u);
    EXPECT_EQ(count_substr(doc, "class=\"end\""), 1u);
    EXPECT_NE(doc.find("fill=\"#fbd3a4\""), std::string::npos);
    EXPECT_TRUE(well_formed_xml(doc));
}

TEST(Overlay, NestedZoomsGreenOutsidePurple) {
    const auto model = svg::build_overlay(nested_zoom_trace(), 100.0);
    ASSERT_EQ(model.areas.size(), 2u);
    EXPECT_EQ(model.areas[0].level, 1);
    EXPECT_EQ(model.areas[1].level, 2);
    EXPECT_GT(model.areas[0].radius, model.areas[1].radius);
    const auto doc = svg::overlay_svg(model);
    const auto green = doc.find("class=\"area level1\" fill=\"#a8dc9a\"");
    const auto purple = doc.find("class=\"area level2\" fill=\"#4a2a6a\"");
    ASSERT_NE(green, std::string::npos);
    ASSERT_NE(purple, std::string::npos);
    EXPECT_LT(green, purple);
    EXPECT_TRUE(well_formed_xml(doc));
}

TEST(Overlay, AreaCentersAreScaledProjections) {
    const double R = 80.0;
    const auto t = nested_zoom_trace();
    const auto model = svg::build_overlay(t, R);
    std::vector<DesignCoords> foci;
    for (const auto& e : t.events) {
        if (e.kind == EventKind::ZoomIn) {
            foci.push_back(e.coords());
        }
    }
    ASSERT_EQ(foci.size(), model.areas.size());
    for (std::size_t i = 0; i < foci.size(); ++i) {
        const auto p = project(foci[i]);
        EXPECT_NEAR(model.areas[i].center.u, R * p.u, 1e-9);
        EXPECT_NEAR(model.areas[i].center.v, R * p.v, 1e-9);
    }
    EXPECT_NEAR(model.startDot.u, 0.0, 1e-12);
    EXPECT_NEAR(model.endDot.u, R * project({0.5, 0.25, 0}).u, 1e-9);
}

TEST(OverlayProperty, AreaHexagonContainsTheProjectedCube) {
    // Every cube point within the interest area projects inside the area hexagon.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& t : simulate_cohort(demo_space(), 6, 3, 4)) {
        const auto model = svg::build_overlay(t, 1.0);
        const auto areas = interest_areas(t);
        for (std::size_t i = 0; i < areas.size(); ++i) {
            for (int k = 0; k < 50; ++k) {
                const DesignCoords c(areas[i].center[0] + areas[i].halfWidth * u(rng),
                                     areas[i].center[1] + areas[i].halfWidth * u(rng),
                                     areas[i].center[2] + areas[i].halfWidth * u(rng));
                const auto offset = project(c) - model.areas[i].center;
                const auto inside = svg::clamp_to_hexagon(offset, model.areas[i].radius);
                EXPECT_NEAR(norm(inside - offset), 0.0, 1e-9);
            }
        }
    }
}

TEST(OverlayGrid, CohortOfTwentyOneBySix) {
    const auto cohort = simulate_cohort(demo_space(), 21, 6, 7);
    svg::GridLayout layout;
    const auto doc = svg::overlay_grid(cohort, 40.0, &layout);
    EXPECT_EQ(count_substr(doc, "<g class=\"cell\""), 126u);
    EXPECT_EQ(count_substr(doc, "<g class=\"task-aggregate\""), 6u);
    EXPECT_EQ(count_substr(doc, "<g class=\"user-aggregate\""), 21u);
    ASSERT_EQ(layout.users.size(), 21u);
    EXPECT_EQ(layout.users[1], "U2");
    EXPECT_EQ(layout.users[9], "U10");
    EXPECT_EQ(layout.tasks.front(), "T1");
    EXPECT_TRUE(well_formed_xml(doc));
    EXPECT_EQ(doc, svg::overlay_grid(cohort, 40.0));
}

TEST(OverlayGrid, MissingCombinationsShowTheBareSpace) {
    std::vector<SessionTrace> traces{TraceScript().user("U1").task("T1").trace()};
    auto other = nested_zoom_trace();
    other.sessionId = "S2";
    other.userId = "U2";
    other.taskId = "T2";
    traces.push_back(other);
    const auto doc = svg::overlay_grid(traces);
    EXPECT_EQ(count_substr(doc, "<g class=\"cell\""), 4u);
    EXPECT_TRUE(well_formed_xml(doc));
}

TEST(SvgText, EscapingAndNumbers) {
    EXPECT_EQ(svg::escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    EXPECT_EQ(svg::num(-0.0), "0.000000");
    EXPECT_EQ(svg::num(-1e-9), "0.000000");
    EXPECT_EQ(svg::num(1.5), "1.500000");
}
