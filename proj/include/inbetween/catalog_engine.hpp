#pragma once

// Navigation state machine of the selection catalog. Every transition is a pure
// function: state in, state out.

#include "inbetween/glyph_space.hpp"
#include "inbetween/hex_projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace inbetween {

inline constexpr int kMaxZoomLevel = 3;
inline constexpr double kCollisionEps = 1e-6;
inline constexpr int kMaxRingNeighbors = 6;
inline constexpr double kRingTolerance = 1e-9;

/// Guideline constants for the audit.
struct GuidelineLimits {
    int smallSetMin = 5;
    int smallSetMax = 7;
    int maxShownWithoutShowAll = 30;
    int openingLabelCount = 4;
};

struct CategoryOption {
    CornerMask corner = 0;
    DesignCoords coords;
    std::array<std::string, 2> labels;
};

struct OpeningSet {
    std::array<CategoryOption, 2> options;
    std::optional<int> selectedIndex;
};

struct DisplayInstance {
    DesignCoords coords;
    HexPoint pos;
    int revealedAtLevel = 0;
    bool isCenter = false;

    bool operator==(const DisplayInstance&) const = default;
};

struct DisplayState {
    std::string spaceHash;
    CornerMask startCorner = 0;
    int zoomLevel = 0;
    double scale = 1.0;
    HexPoint panOffset;
    std::vector<DisplayInstance> shown;
    std::vector<DesignCoords> occluded;
    std::optional<DesignCoords> fineTuneTarget;

    bool showAll = false;
    // Display saved when show-all was switched on; restored when it is switched off.
    std::vector<DisplayInstance> stashedShown;
    std::vector<DesignCoords> stashedOccluded;

    bool operator==(const DisplayState&) const = default;

    const DisplayInstance& center() const {
        auto it = std::find_if(shown.begin(), shown.end(), [](const auto& d) { return d.isCenter; });
        return *it;
    }

    bool is_shown(const DesignCoords& c) const {
        return std::any_of(shown.begin(), shown.end(), [&](const auto& d) { return d.coords == c; });
    }
};

/// Design-space step between instances revealed at `level`.
inline double level_step(int level) { return std::ldexp(1.0, -level); }

/// Copy of `state` with shown/occluded lists sorted, for order-insensitive comparison.
inline DisplayState normalized(DisplayState s) {
    auto by_coords = [](const DisplayInstance& a, const DisplayInstance& b) { return a.coords < b.coords; };
    std::sort(s.shown.begin(), s.shown.end(), by_coords);
    std::sort(s.occluded.begin(), s.occluded.end());
    std::sort(s.stashedShown.begin(), s.stashedShown.end(), by_coords);
    std::sort(s.stashedOccluded.begin(), s.stashedOccluded.end());
    return s;
}

namespace detail {

inline HexPoint display_pos(const DisplayState& s, const DesignCoords& c) {
    return s.scale * project(c) + s.panOffset;
}

inline void reposition(DisplayState& s) {
    for (auto& d : s.shown) {
        d.pos = display_pos(s, d.coords);
    }
}

inline void add_occluded(std::vector<DesignCoords>& occluded, const DesignCoords& c) {
    if (std::find(occluded.begin(), occluded.end(), c) == occluded.end()) {
        occluded.push_back(c);
    }
}

/// Keeps one instance per collision class: the center if present, otherwise the
/// one whose depth is nearest the center's depth (ties: smaller depth, then
/// smaller coords). Losers move to `occluded`. Winners keep their order.
inline void resolve_occlusion(DisplayState& s) {
    const double centerDepth = depth(s.center().coords);
    auto better = [&](const DisplayInstance& a, const DisplayInstance& b) {
        if (a.isCenter != b.isCenter) {
            return a.isCenter;
        }
        const double da = std::abs(depth(a.coords) - centerDepth);
        const double db = std::abs(depth(b.coords) - centerDepth);
        if (da != db) {
            return da < db;
        }
        if (depth(a.coords) != depth(b.coords)) {
            return depth(a.coords) < depth(b.coords);
        }
        return a.coords < b.coords;
    };
    std::vector<bool> dropped(s.shown.size(), false);
    for (std::size_t i = 0; i < s.shown.size(); ++i) {
        if (dropped[i]) {
            continue;
        }
        for (std::size_t j = i + 1; j < s.shown.size(); ++j) {
            if (dropped[j] || !collides(s.shown[i].coords, s.shown[j].coords, kCollisionEps)) {
                continue;
            }
            if (better(s.shown[j], s.shown[i])) {
                dropped[i] = true;
                break;
            }
            dropped[j] = true;
        }
    }
    std::vector<DisplayInstance> kept;
    for (std::size_t i = 0; i < s.shown.size(); ++i) {
        if (dropped[i]) {
            add_occluded(s.occluded, s.shown[i].coords);
        } else {
            kept.push_back(s.shown[i]);
        }
    }
    s.shown = std::move(kept);
}

inline void require_shown(const DisplayState& s, const DesignCoords& c) {
    if (!s.is_shown(c)) {
        throw Error(ErrorCode::TargetNotShown, "instance is not shown", {{"coords", c.values()}});
    }
}

inline void require_navigable(const DisplayState& s) {
    if (s.showAll) {
        throw Error(ErrorCode::ShowAllActive, "navigation is disabled while all instances are shown");
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Transitions
// ---------------------------------------------------------------------------

inline OpeningSet open_catalog(const DesignSpace& space) {
    OpeningSet set;
    for (int k = 0; k < 2; ++k) {
        const auto& sc = space.startCorners[k];
        set.options[k] = {sc.corner, corner_coords(sc.corner), sc.labels};
    }
    return set;
}

inline DisplayState select_category(const DesignSpace& space, CornerMask corner) {
    if (space.startCorners[0].corner != corner && space.startCorners[1].corner != corner) {
        throw Error(ErrorCode::UnknownCategory, "corner " + std::to_string(corner) + " is not a start corner",
                    {{"corner", corner}});
    }
    DisplayState s;
    s.spaceHash = space.spaceHash;
    s.startCorner = corner;
    s.zoomLevel = 0;
    s.scale = 1.0;
    const auto center = corner_coords(corner);
    s.panOffset = -1.0 * project(center);
    s.shown.push_back({center, {}, 0, true});
    for (int b = 0; b < kCornerCount; ++b) {
        if (b != corner) {
            s.shown.push_back({corner_coords(static_cast<CornerMask>(b)), {}, 0, false});
        }
    }
    detail::reposition(s);
    detail::resolve_occlusion(s);
    return s;
}

/// Shown instances on the current ring around `target`: display distance equal
/// to the current level step (before scaling), nearest first, at most 6.
inline std::vector<DesignCoords> ring_neighbors(const DisplayState& s, const DesignCoords& target) {
    const double radius = level_step(s.zoomLevel);
    const HexPoint origin = project(target);
    std::vector<std::pair<double, DesignCoords>> found;
    for (const auto& d : s.shown) {
        if (d.coords == target) {
            continue;
        }
        const double dist = norm(project(d.coords) - origin);
        if (std::abs(dist - radius) < kRingTolerance) {
            found.emplace_back(dist, d.coords);
        }
    }
    std::sort(found.begin(), found.end());
    std::vector<DesignCoords> out;
    for (std::size_t i = 0; i < found.size() && i < kMaxRingNeighbors; ++i) {
        out.push_back(found[i].second);
    }
    return out;
}

/// Midway variations between `target` and each ring neighbor, excluding
/// anything already shown. Side-effect free.
inline std::vector<DesignCoords> hover_preview(const DisplayState& s, const DesignCoords& target) {
    detail::require_navigable(s);
    detail::require_shown(s, target);
    std::vector<DesignCoords> previews;
    for (const auto& n : ring_neighbors(s, target)) {
        const auto m = midpoint(target, n);
        if (!s.is_shown(m) && std::find(previews.begin(), previews.end(), m) == previews.end()) {
            previews.push_back(m);
        }
    }
    return previews;
}

inline DisplayState zoom_in(const DisplayState& state, const DesignCoords& focus) {
    detail::require_navigable(state);
    detail::require_shown(state, focus);
    if (state.zoomLevel >= kMaxZoomLevel) {
        throw Error(ErrorCode::MaxZoom, "maximum zoom level reached; use fine-tuning",
                    {{"zoomLevel", state.zoomLevel}});
    }
    const auto previews = hover_preview(state, focus);
    DisplayState s = state;
    s.zoomLevel += 1;
    s.scale = std::ldexp(1.0, s.zoomLevel);
    s.panOffset = -s.scale * project(focus);
    for (auto& d : s.shown) {
        d.isCenter = d.coords == focus;
    }
    for (const auto& p : previews) {
        s.shown.push_back({p, {}, s.zoomLevel, false});
    }
    detail::reposition(s);
    detail::resolve_occlusion(s);
    return s;
}

/// Replaces every coordinate by its antipode. An involution.
inline DisplayState toggle_start(const DisplayState& state) {
    DisplayState s = state;
    s.startCorner = static_cast<CornerMask>(s.startCorner ^ 7);
    for (auto* list : {&s.shown, &s.stashedShown}) {
        for (auto& d : *list) {
            d.coords = d.coords.antipode();
        }
    }
    for (auto* list : {&s.occluded, &s.stashedOccluded}) {
        for (auto& c : *list) {
            c = c.antipode();
        }
    }
    s.panOffset = -s.scale * project(s.center().coords);
    detail::reposition(s);
    for (auto& d : s.stashedShown) {
        d.pos = detail::display_pos(s, d.coords);
    }
    return s;
}

/// The {0, 0.5, 1}^3 lattice.
inline std::vector<DesignCoords> show_all_lattice() {
    std::vector<DesignCoords> out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                out.emplace_back(i * 0.5, j * 0.5, k * 0.5);
            }
        }
    }
    return out;
}

/// Toggles the show-all display. Switching on adds the lattice to the current
/// display; switching off restores the display exactly as it was.
inline DisplayState show_all(const DisplayState& state) {
    DisplayState s = state;
    if (s.showAll) {
        s.shown = std::move(s.stashedShown);
        s.occluded = std::move(s.stashedOccluded);
        s.stashedShown.clear();
        s.stashedOccluded.clear();
        s.showAll = false;
        detail::reposition(s);
        return s;
    }
    s.stashedShown = s.shown;
    s.stashedOccluded = s.occluded;
    s.showAll = true;
    for (const auto& c : show_all_lattice()) {
        if (!s.is_shown(c)) {
            s.shown.push_back({c, {}, 0, false});
        }
    }
    detail::reposition(s);
    detail::resolve_occlusion(s);
    return s;
}

/// Selects an instance for fine-tuning.
inline DisplayState click(const DisplayState& state, const DesignCoords& target) {
    detail::require_shown(state, target);
    DisplayState s = state;
    s.fineTuneTarget = target;
    return s;
}

struct FineTuneOutcome {
    DisplayState state;
    DesignCoords coords;
};

/// Replaces one component of the fine-tune target. No snapping.
inline FineTuneOutcome fine_tune(const DisplayState& state, const DesignCoords& base, int axis, double value) {
    if (!state.fineTuneTarget || *state.fineTuneTarget != base) {
        throw Error(ErrorCode::NoFineTuneTarget, "fine-tuning requires the clicked instance as base");
    }
    if (axis < 0 || axis >= kAxisCount) {
        throw Error(ErrorCode::ValueOutOfRange, "axis must be 0, 1 or 2", {{"axis", axis}});
    }
    if (!(value >= 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::ValueOutOfRange, "fine-tune value must lie in [0,1]", {{"value", value}});
    }
    FineTuneOutcome out{state, base.with(static_cast<std::size_t>(axis), value)};
    out.state.fineTuneTarget = out.coords;
    return out;
}

/// Stateless ring around `coords` at `level`: for each of the six display
/// directions, the in-cube design point one level step away (kernel shifts
/// allowed), deduplicated.
inline std::vector<DesignCoords> neighbors_at_level(const DesignCoords& coords, int level) {
    const double step = level_step(level);
    std::vector<DesignCoords> out;
    auto in_cube = [](const std::array<double, 3>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && x <= 1.0; });
    };
    for (int axis = 0; axis < 3; ++axis) {
        for (double sign : {1.0, -1.0}) {
            std::array<double, 3> v = coords.values();
            v[axis] += sign * step;
            if (!in_cube(v)) {
                // Same display point: shift along (1,1,1) against the direction.
                for (auto& x : v) {
                    x -= sign * step;
                }
            }
            if (in_cube(v)) {
                DesignCoords c(v);
                if (std::find(out.begin(), out.end(), c) == out.end()) {
                    out.push_back(c);
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Guideline audit
// ---------------------------------------------------------------------------

struct AuditCheck {
    std::string ruleId;
    bool pass = false;
    std::string detail;
};

struct AuditReport {
    std::vector<AuditCheck> checks;

    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
    }
    const AuditCheck* find(const std::string& id) const {
        for (const auto& c : checks) {
            if (c.ruleId == id) {
                return &c;
            }
        }
        return nullptr;
    }
};

/// An opening set followed by the display states a session passed through.
struct AuditFlow {
    OpeningSet opening;
    std::vector<DisplayState> states;
};

namespace detail {

struct ZoomCommit {
    std::size_t index;
    std::vector<DesignCoords> added;
    DesignCoords focus;
};

inline std::vector<ZoomCommit> zoom_commits(const std::vector<DisplayState>& states) {
    std::vector<ZoomCommit> out;
    for (std::size_t i = 1; i < states.size(); ++i) {
        const auto& prev = states[i - 1];
        const auto& next = states[i];
        if (next.zoomLevel != prev.zoomLevel + 1 || next.showAll || prev.showAll) {
            continue;
        }
        ZoomCommit zc{i, {}, next.center().coords};
        for (const auto& d : next.shown) {
            if (!prev.is_shown(d.coords) && d.coords != zc.focus) {
                zc.added.push_back(d.coords);
            }
        }
        out.push_back(std::move(zc));
    }
    return out;
}

} // namespace detail

inline AuditReport audit_guidelines(const AuditFlow& flow, const GuidelineLimits& limits = {}) {
    AuditReport report;
    const auto& opening = flow.opening;

    report.checks.push_back({"R1", !opening.selectedIndex.has_value(),
                             opening.selectedIndex ? "opening option " + std::to_string(*opening.selectedIndex) +
                                                         " is preselected"
                                                   : "no default option"});

    std::set<std::string> labels;
    bool emptyLabel = false;
    for (const auto& o : opening.options) {
        for (const auto& l : o.labels) {
            emptyLabel = emptyLabel || l.empty();
            labels.insert(l);
        }
    }
    const bool r2 = !emptyLabel && static_cast<int>(labels.size()) == limits.openingLabelCount;
    report.checks.push_back({"R2", r2, std::to_string(labels.size()) + " distinct category labels on 2 options"});

    const auto commits = detail::zoom_commits(flow.states);
    {
        bool pass = true;
        std::string detail = std::to_string(commits.size()) + " zoom commits";
        for (const auto& zc : commits) {
            if (zc.added.size() % 2 != 0) {
                pass = false;
                detail = "state " + std::to_string(zc.index) + " zoom added an odd count (" +
                         std::to_string(zc.added.size()) + ") of options";
                break;
            }
        }
        report.checks.push_back({"R3", pass, detail});
    }

    if (flow.states.empty()) {
        report.checks.push_back({"R4", false, "no initial display"});
    } else {
        const int options = static_cast<int>(flow.states.front().shown.size()) - 1;
        const bool pass = options >= limits.smallSetMin && options <= limits.smallSetMax;
        report.checks.push_back({"R4", pass, std::to_string(options) + " options around the center"});
    }

    {
        bool pass = true;
        std::size_t maxShown = 0;
        for (std::size_t i = 0; i < flow.states.size(); ++i) {
            const auto& s = flow.states[i];
            if (!s.showAll) {
                maxShown = std::max(maxShown, s.shown.size());
                if (static_cast<int>(s.shown.size()) > limits.maxShownWithoutShowAll) {
                    pass = false;
                }
            }
        }
        report.checks.push_back({"R5", pass, "max shown without show-all: " + std::to_string(maxShown)});
    }

    {
        bool pass = true;
        std::string detail;
        double lastStep = std::numeric_limits<double>::infinity();
        int lastLevel = -1;
        for (const auto& zc : commits) {
            if (zc.added.empty()) {
                continue;
            }
            const int level = flow.states[zc.index].zoomLevel;
            if (level <= lastLevel) {
                lastStep = std::numeric_limits<double>::infinity();  // a reset started a new exploration
            }
            double step = 0.0;
            for (const auto& a : zc.added) {
                step = std::max(step, distance_linf(a, zc.focus));
            }
            detail += (detail.empty() ? "" : " -> ") + std::to_string(step);
            if (!(step < lastStep)) {
                pass = false;
            }
            lastStep = step;
            lastLevel = level;
        }
        report.checks.push_back({"R6", pass, detail.empty() ? "no zoom reveals" : "steps " + detail});
    }
    return report;
}

/// Scripted demo flow from the first start corner c: zoom on c, then on the
/// face midpoint between c and its axis-0/1 neighbors, then half-way back.
/// For c = (0,0,0): (0,0,0) -> (0.5,0.5,0) -> (0.25,0.25,0).
inline AuditFlow demo_flow(const DesignSpace& space) {
    AuditFlow flow;
    flow.opening = open_catalog(space);
    const CornerMask corner = space.startCorners[0].corner;
    auto s = select_category(space, corner);
    flow.states.push_back(s);
    const auto c = corner_coords(corner);
    s = zoom_in(s, c);
    flow.states.push_back(s);
    const auto second = DesignCoords(std::abs(c[0] - 0.5), std::abs(c[1] - 0.5), c[2]);
    s = zoom_in(s, second);
    flow.states.push_back(s);
    const auto third = midpoint(c, second);
    s = zoom_in(s, third);
    flow.states.push_back(s);
    return flow;
}

} // namespace inbetween
