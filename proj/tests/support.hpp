#pragma once

#include "inbetween/inbetween.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

namespace testing_support {

inline const inbetween::DesignSpace& demo_space() {
    static const inbetween::DesignSpace space = inbetween::demo::make_demo_space();
    return space;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t") {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("inbetween-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline bool well_formed_xml(const std::string& text) {
    try {
        std::istringstream in(text);
        boost::property_tree::ptree tree;
        boost::property_tree::read_xml(in, tree);
        return tree.count("svg") == 1;
    } catch (const boost::property_tree::xml_parser_error&) {
        return false;
    }
}

inline std::size_t count_substr(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

inline inbetween::GlyphOutline unit_square() {
    using inbetween::NodeKind;
    inbetween::GlyphOutline g;
    g.glyphName = "square";
    g.advanceWidth = 1000.0;
    g.contours.push_back({{{0, 0, NodeKind::OnCurve},
                           {1000, 0, NodeKind::OnCurve},
                           {1000, 1000, NodeKind::OnCurve},
                           {0, 1000, NodeKind::OnCurve}},
                          true});
    return g;
}

inline inbetween::DesignCoords random_coords(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    const double y = u(rng);
    const double z = u(rng);
    return {x, y, z};
}

/// Hand-assembled trace; seq and tMs are assigned in order.
class TraceScript {
public:
    explicit TraceScript(inbetween::InterfaceKind kind = inbetween::InterfaceKind::Inbetween,
                         std::string sessionId = "S1") {
        trace_.sessionId = std::move(sessionId);
        trace_.userId = "U1";
        trace_.taskId = "T1";
        trace_.interfaceKind = kind;
        trace_.spaceHash = demo_space().spaceHash;
        add(inbetween::EventKind::SessionStart);
    }
    TraceScript& add(inbetween::EventKind kind, inbetween::EventPayload payload = {}, std::int64_t dt = 100) {
        t_ += dt;
        trace_.events.push_back(inbetween::make_event(static_cast<std::int64_t>(trace_.events.size()) + 1, t_, kind,
                                                      std::move(payload)));
        return *this;
    }
    TraceScript& user(std::string u) {
        trace_.userId = std::move(u);
        return *this;
    }
    TraceScript& task(std::string t) {
        trace_.taskId = std::move(t);
        return *this;
    }
    inbetween::SessionTrace trace() const { return trace_; }

private:
    inbetween::SessionTrace trace_;
    std::int64_t t_ = 0;
};

/// Empty when `s` satisfies the display invariants, else a description.
inline std::string display_violation(const inbetween::DisplayState& s, double tol = 1e-9) {
    using namespace inbetween;
    int centers = 0;
    for (const auto& d : s.shown) {
        centers += d.isCenter;
        const auto expect = s.scale * project(d.coords) + s.panOffset;
        if (norm(d.pos - expect) > tol) {
            return "position drift";
        }
    }
    if (centers != 1) {
        return "center count " + std::to_string(centers);
    }
    for (std::size_t i = 0; i < s.shown.size(); ++i) {
        for (std::size_t j = i + 1; j < s.shown.size(); ++j) {
            if (collides(s.shown[i].coords, s.shown[j].coords, kCollisionEps)) {
                return "colliding shown instances";
            }
        }
    }
    if (s.zoomLevel < 0 || s.zoomLevel > kMaxZoomLevel) {
        return "zoom level out of range";
    }
    if (s.scale != std::ldexp(1.0, s.zoomLevel)) {
        return "scale does not match level";
    }
    return {};
}

enum class FuzzOp { Select, Hover, Zoom, Toggle, ShowAll, Click, FineTune };

/// Applies one random legal operation. `op` receives the kind applied.
inline inbetween::DisplayState fuzz_step(const inbetween::DesignSpace& space, const inbetween::DisplayState& s,
                                         std::mt19937_64& rng, FuzzOp& op) {
    using namespace inbetween;
    auto pick_shown = [&]() {
        return s.shown[std::uniform_int_distribution<std::size_t>(0, s.shown.size() - 1)(rng)].coords;
    };
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        op = static_cast<FuzzOp>(std::uniform_int_distribution<int>(0, 6)(rng));
        switch (op) {
        case FuzzOp::Select:
            if (u(rng) < 0.1) {
                return select_category(space, space.startCorners[rng() % 2].corner);
            }
            break;
        case FuzzOp::Hover:
            if (!s.showAll) {
                (void)hover_preview(s, pick_shown());
                return s;
            }
            break;
        case FuzzOp::Zoom:
            if (!s.showAll && s.zoomLevel < kMaxZoomLevel) {
                return zoom_in(s, pick_shown());
            }
            break;
        case FuzzOp::Toggle:
            return toggle_start(s);
        case FuzzOp::ShowAll:
            return show_all(s);
        case FuzzOp::Click:
            return click(s, pick_shown());
        case FuzzOp::FineTune:
            if (s.fineTuneTarget) {
                return fine_tune(s, *s.fineTuneTarget, static_cast<int>(rng() % 3), u(rng)).state;
            }
            break;
        }
    }
}

} // namespace testing_support
