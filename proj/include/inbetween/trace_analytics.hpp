#pragma once

// Selection processes as decision-tree traversals: tree construction, interest
// areas, pattern classification, cohort metrics, slider-sweep detection, and a
// seeded trace simulator used both as test oracle and demo-corpus generator.

#include "inbetween/catalog_engine.hpp"
#include "inbetween/session_log.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace inbetween {

/// Quantification of the pattern taxonomy. All thresholds live here.
struct AnalyticsConfig {
    double convergenceRadius = 0.5;      // L-inf, around the first focus and the start
    int wanderingOctants = 3;            // distinct octants of the 2x2x2 partition
    int overlapGridCells = 4;            // per axis
    int sweepWindow = 20;                // first N slider moves per axis
    double sweepLow = 0.05;
    double sweepHigh = 0.95;
    int blindSelectionSweeps = 3;
    std::int64_t dwellMs = 1000;         // hover dwell that makes a point of interest
};

// ---------------------------------------------------------------------------
// Decision tree and interest areas
// ---------------------------------------------------------------------------

struct DecisionTree {
    struct Node {
        DesignCoords coords;
        int level = 0;
        std::int64_t firstSeq = 0;
        std::optional<std::size_t> parent;
    };
    std::vector<Node> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // parent -> child
    std::vector<std::size_t> traversalOrder;
};

inline void require_inbetween(const SessionTrace& t) {
    if (t.interfaceKind != InterfaceKind::Inbetween) {
        throw Error(ErrorCode::WrongInterface, "operation needs an inbetween trace", {{"sessionId", t.sessionId}});
    }
}

inline void require_control(const SessionTrace& t) {
    if (t.interfaceKind != InterfaceKind::Control) {
        throw Error(ErrorCode::WrongInterface, "operation needs a control trace", {{"sessionId", t.sessionId}});
    }
}

/// Root at the selected category corner; each zoom adds a child of the most
/// recent node. A Reset followed by a new CategorySelect starts another root.
inline DecisionTree build_tree(const SessionTrace& trace) {
    require_inbetween(trace);
    DecisionTree tree;
    std::optional<std::size_t> current;
    for (const auto& e : trace.events) {
        if (e.kind == EventKind::CategorySelect) {
            tree.nodes.push_back({e.coords(), 0, e.seq, std::nullopt});
            current = tree.nodes.size() - 1;
            tree.traversalOrder.push_back(*current);
        } else if (e.kind == EventKind::ZoomIn) {
            if (!current) {
                throw Error(ErrorCode::IllegalEvent, "ZoomIn before CategorySelect", {{"seq", e.seq}});
            }
            const int level = tree.nodes[*current].level + 1;
            tree.nodes.push_back({e.coords(), level, e.seq, current});
            const auto id = tree.nodes.size() - 1;
            tree.edges.emplace_back(*current, id);
            tree.traversalOrder.push_back(id);
            current = id;
        } else if (e.kind == EventKind::Reset) {
            current.reset();
        }
    }
    return tree;
}

struct InterestArea {
    DesignCoords center;
    double halfWidth = 0.5;

    bool operator==(const InterestArea&) const = default;
};

inline std::vector<InterestArea> interest_areas(const SessionTrace& trace) {
    require_inbetween(trace);
    std::vector<InterestArea> areas;
    int level = 0;
    for (const auto& e : trace.events) {
        if (e.kind == EventKind::CategorySelect || e.kind == EventKind::Reset) {
            level = 0;
        } else if (e.kind == EventKind::ZoomIn) {
            ++level;
            areas.push_back({e.coords(), level_step(level)});
        }
    }
    return areas;
}

/// Click targets plus hovers followed by at least `dwellMs` of inactivity.
inline std::vector<DesignCoords> points_of_interest(const SessionTrace& trace, const AnalyticsConfig& cfg = {}) {
    std::vector<DesignCoords> out;
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const auto& e = trace.events[i];
        if (e.kind == EventKind::Click) {
            out.push_back(e.coords());
        } else if (e.kind == EventKind::Hover && i + 1 < trace.events.size() &&
                   trace.events[i + 1].tMs - e.tMs >= cfg.dwellMs) {
            out.push_back(e.coords());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Features and classification
// ---------------------------------------------------------------------------

enum class Pattern { NonSelection, MinimalInteraction, Convergent, Wandering, Other };

inline std::string to_string(Pattern p) {
    switch (p) {
    case Pattern::NonSelection: return "NonSelection";
    case Pattern::MinimalInteraction: return "MinimalInteraction";
    case Pattern::Convergent: return "Convergent";
    case Pattern::Wandering: return "Wandering";
    case Pattern::Other: return "Other";
    }
    return "?";
}

inline constexpr std::size_t kFeatureCount = 5;
using FeatureVector = std::array<double, kFeatureCount>;

struct TraceFeatures {
    int zoomCount = 0;
    int octantCount = 0;
    double pathLength = 0.0;
    double endStartDistLinf = 0.0;
    int fineTuneCount = 0;
    CornerMask startCorner = 0;

    FeatureVector vector() const {
        return {static_cast<double>(zoomCount), static_cast<double>(octantCount), pathLength, endStartDistLinf,
                static_cast<double>(fineTuneCount)};
    }
    bool operator==(const TraceFeatures&) const = default;
};

inline constexpr const char* kFeatureNames[kFeatureCount] = {"zoomCount", "octantCount", "pathLength",
                                                             "endStartDistLinf", "fineTuneCount"};

struct PatternReport {
    std::set<Pattern> labels;
    TraceFeatures features;

    bool has(Pattern p) const { return labels.count(p) != 0; }
};

/// Octant of the 2x2x2 partition; bit i set when c_i >= 0.5.
inline int octant(const DesignCoords& c) {
    int o = 0;
    for (int i = 0; i < 3; ++i) {
        if (c[i] >= 0.5) {
            o |= 1 << i;
        }
    }
    return o;
}

namespace detail {

struct TraceWalk {
    std::optional<DesignCoords> start;
    std::optional<DesignCoords> end;
    std::vector<DesignCoords> foci;
    std::vector<DesignCoords> path;
    std::optional<std::size_t> firstZoomIndex;
    std::size_t downloadIndex = 0;
    int fineTunes = 0;
};

inline TraceWalk walk(const SessionTrace& trace) {
    TraceWalk w;
    std::optional<DesignCoords> target;
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const auto& e = trace.events[i];
        switch (e.kind) {
        case EventKind::CategorySelect:
            if (!w.start) {
                w.start = e.coords();
            }
            w.path.push_back(e.coords());
            break;
        case EventKind::ZoomIn:
            if (!w.firstZoomIndex) {
                w.firstZoomIndex = i;
            }
            w.foci.push_back(e.coords());
            w.path.push_back(e.coords());
            break;
        case EventKind::Click:
            target = e.coords();
            w.path.push_back(e.coords());
            break;
        case EventKind::FineTune:
            ++w.fineTunes;
            if (target) {
                const auto& av = e.axis_value();
                target = target->with(static_cast<std::size_t>(std::clamp(av.axis, 0, 2)), av.value);
                w.path.push_back(*target);
            }
            break;
        case EventKind::Download:
            if (!w.end) {
                w.end = e.coords();
                w.downloadIndex = i;
                w.path.push_back(e.coords());
            }
            break;
        case EventKind::Reset:
            target.reset();
            break;
        default:
            break;
        }
    }
    return w;
}

} // namespace detail

/// Design-space positions visited: category corner, zoom foci, clicked and
/// fine-tuned instances, and the downloaded instance.
inline std::vector<DesignCoords> exploration_path(const SessionTrace& trace) { return detail::walk(trace).path; }

/// Features of a trace that has a CategorySelect and a Download.
inline TraceFeatures trace_features(const SessionTrace& trace) {
    require_inbetween(trace);
    const auto w = detail::walk(trace);
    if (!w.end) {
        throw Error(ErrorCode::MissingDownload, "trace has no Download", {{"sessionId", trace.sessionId}});
    }
    if (!w.start) {
        throw Error(ErrorCode::IllegalEvent, "trace has no CategorySelect", {{"sessionId", trace.sessionId}});
    }
    TraceFeatures f;
    f.zoomCount = static_cast<int>(w.foci.size());
    std::set<int> octants;
    for (const auto& c : w.foci) {
        octants.insert(octant(c));
    }
    f.octantCount = static_cast<int>(octants.size());
    for (std::size_t i = 1; i < w.path.size(); ++i) {
        f.pathLength += distance_l2(w.path[i - 1], w.path[i]);
    }
    f.endStartDistLinf = distance_linf(*w.end, *w.start);
    f.fineTuneCount = w.fineTunes;
    f.startCorner = as_corner(*w.start).value_or(0);
    return f;
}

inline PatternReport classify(const SessionTrace& trace, const AnalyticsConfig& cfg = {}) {
    PatternReport report;
    report.features = trace_features(trace);
    const auto& f = report.features;
    const auto w = detail::walk(trace);

    if (f.zoomCount == 0) {
        report.labels.insert(Pattern::NonSelection);
        return report;
    }
    if (f.zoomCount == 1) {
        bool onlyRefinement = true;
        for (std::size_t i = *w.firstZoomIndex + 1; i <= w.downloadIndex; ++i) {
            const auto k = trace.events[i].kind;
            if (k != EventKind::Click && k != EventKind::FineTune && k != EventKind::TextEdit &&
                k != EventKind::Download) {
                onlyRefinement = false;
                break;
            }
        }
        if (onlyRefinement) {
            report.labels.insert(Pattern::MinimalInteraction);
        }
    }
    const bool wandering = f.octantCount >= cfg.wanderingOctants;
    if (wandering) {
        report.labels.insert(Pattern::Wandering);
    } else {
        const bool contained = std::all_of(w.foci.begin(), w.foci.end(), [&](const DesignCoords& c) {
            return distance_linf(c, w.foci.front()) <= cfg.convergenceRadius;
        });
        if (contained && f.endStartDistLinf <= cfg.convergenceRadius) {
            report.labels.insert(Pattern::Convergent);
        }
    }
    if (report.labels.empty()) {
        report.labels.insert(Pattern::Other);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Cohort metrics
// ---------------------------------------------------------------------------

struct CorpusStats {
    FeatureVector mean{};
    FeatureVector stddev{};  // population standard deviation
};

inline CorpusStats corpus_stats(std::span<const FeatureVector> corpus) {
    CorpusStats s;
    if (corpus.empty()) {
        return s;
    }
    const double n = static_cast<double>(corpus.size());
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        double sum = 0.0;
        for (const auto& v : corpus) {
            sum += v[k];
        }
        s.mean[k] = sum / n;
        double sq = 0.0;
        for (const auto& v : corpus) {
            sq += (v[k] - s.mean[k]) * (v[k] - s.mean[k]);
        }
        s.stddev[k] = std::sqrt(sq / n);
    }
    return s;
}

namespace detail {

/// Deterministic order for traces so that reductions do not depend on input order.
inline std::vector<const SessionTrace*> sorted_traces(std::span<const SessionTrace> traces) {
    std::vector<const SessionTrace*> out;
    for (const auto& t : traces) {
        out.push_back(&t);
    }
    std::sort(out.begin(), out.end(), [](const SessionTrace* a, const SessionTrace* b) {
        if (a->taskId != b->taskId) {
            return a->taskId < b->taskId;
        }
        if (a->userId != b->userId) {
            return a->userId < b->userId;
        }
        if (a->sessionId != b->sessionId) {
            return a->sessionId < b->sessionId;
        }
        return canonical_text(*a) < canonical_text(*b);
    });
    return out;
}

inline constexpr double kZeroVariance = 1e-12;

} // namespace detail

/// Cosine similarity of two standardized vectors mapped to [0,1]. Two zero
/// vectors count as identical; one zero vector as orthogonal.
inline double similarity01(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    double cosine;
    if (na == 0.0 && nb == 0.0) {
        cosine = 1.0;
    } else if (na == 0.0 || nb == 0.0) {
        cosine = 0.0;
    } else {
        cosine = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
    }
    return (cosine + 1.0) / 2.0;
}

/// z-scores `v` with corpus statistics, dropping zero-variance features.
inline std::vector<double> standardize(const FeatureVector& v, const CorpusStats& stats) {
    std::vector<double> out;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        if (stats.stddev[k] > detail::kZeroVariance) {
            out.push_back((v[k] - stats.mean[k]) / stats.stddev[k]);
        }
    }
    return out;
}

/// Mean pairwise similarity of one user's standardized feature vectors.
inline double coherence_score(std::span<const SessionTrace> userTraces, const CorpusStats& stats) {
    if (userTraces.size() < 2) {
        throw Error(ErrorCode::InsufficientTraces, "coherence needs at least 2 traces");
    }
    for (const auto& t : userTraces) {
        if (t.userId != userTraces.front().userId) {
            throw Error(ErrorCode::MixedTraces, "coherence traces must share a user");
        }
    }
    const auto sorted = detail::sorted_traces(userTraces);
    std::vector<std::vector<double>> z;
    for (const auto* t : sorted) {
        z.push_back(standardize(trace_features(*t).vector(), stats));
    }
    double sum = 0.0;
    int pairs = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            sum += similarity01(z[i], z[j]);
            ++pairs;
        }
    }
    return std::clamp(sum / pairs, 0.0, 1.0);
}

/// Coherence using the user's own traces as the corpus.
inline double coherence_score(std::span<const SessionTrace> userTraces) {
    std::vector<FeatureVector> corpus;
    for (const auto& t : userTraces) {
        corpus.push_back(trace_features(t).vector());
    }
    return coherence_score(userTraces, corpus_stats(corpus));
}

/// Cells of the overlap grid whose centers lie in any interest area (L-inf, closed).
inline std::set<int> interest_cells(const SessionTrace& trace, const AnalyticsConfig& cfg = {}) {
    const int n = cfg.overlapGridCells;
    std::set<int> cells;
    const auto areas = interest_areas(trace);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const DesignCoords center((i + 0.5) / n, (j + 0.5) / n, (k + 0.5) / n);
                for (const auto& a : areas) {
                    if (distance_linf(center, a.center) <= a.halfWidth) {
                        cells.insert((i * n + j) * n + k);
                        break;
                    }
                }
            }
        }
    }
    return cells;
}

inline double jaccard(const std::set<int>& a, const std::set<int>& b) {
    if (a.empty() && b.empty()) {
        return 1.0;
    }
    if (a.empty() || b.empty()) {
        return 0.0;
    }
    std::size_t common = 0;
    for (int x : a) {
        common += b.count(x);
    }
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

inline double within_task_overlap(std::span<const SessionTrace> taskTraces, const AnalyticsConfig& cfg = {}) {
    if (taskTraces.size() < 2) {
        throw Error(ErrorCode::InsufficientTraces, "overlap needs at least 2 traces");
    }
    for (const auto& t : taskTraces) {
        if (t.taskId != taskTraces.front().taskId) {
            throw Error(ErrorCode::MixedTraces, "overlap traces must share a task");
        }
    }
    const auto sorted = detail::sorted_traces(taskTraces);
    std::vector<std::set<int>> cells;
    for (const auto* t : sorted) {
        cells.push_back(interest_cells(*t, cfg));
    }
    double sum = 0.0;
    int pairs = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            sum += jaccard(cells[i], cells[j]);
            ++pairs;
        }
    }
    return std::clamp(sum / pairs, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Slider sweeps (control interface)
// ---------------------------------------------------------------------------

struct SweepReport {
    std::array<int, 3> sweeps{0, 0, 0};
    bool blindSelection = false;

    int total() const { return sweeps[0] + sweeps[1] + sweeps[2]; }
};

/// Counts extreme-to-extreme transitions per axis within the first
/// `sweepWindow` slider moves of that axis. Sliders start at 0.
inline SweepReport detect_extreme_sweeps(const SessionTrace& trace, const AnalyticsConfig& cfg = {}) {
    require_control(trace);
    enum class Extreme { Low, High };
    std::array<Extreme, 3> last{Extreme::Low, Extreme::Low, Extreme::Low};
    std::array<int, 3> seen{0, 0, 0};
    SweepReport r;
    for (const auto& e : trace.events) {
        if (e.kind == EventKind::Reset) {
            last = {Extreme::Low, Extreme::Low, Extreme::Low};
            continue;
        }
        if (e.kind != EventKind::SliderMove) {
            continue;
        }
        const auto& av = e.axis_value();
        if (av.axis < 0 || av.axis > 2 || seen[av.axis] >= cfg.sweepWindow) {
            continue;
        }
        ++seen[av.axis];
        if (av.value <= cfg.sweepLow) {
            if (last[av.axis] == Extreme::High) {
                ++r.sweeps[av.axis];
            }
            last[av.axis] = Extreme::Low;
        } else if (av.value >= cfg.sweepHigh) {
            if (last[av.axis] == Extreme::Low) {
                ++r.sweeps[av.axis];
            }
            last[av.axis] = Extreme::High;
        }
    }
    r.blindSelection = r.total() >= cfg.blindSelectionSweeps;
    return r;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

enum class Archetype { NonSelection, MinimalInteraction, Convergent, Wandering };

inline constexpr Archetype kArchetypes[] = {Archetype::NonSelection, Archetype::MinimalInteraction,
                                            Archetype::Convergent, Archetype::Wandering};

inline Pattern pattern_of(Archetype a) {
    switch (a) {
    case Archetype::NonSelection: return Pattern::NonSelection;
    case Archetype::MinimalInteraction: return Pattern::MinimalInteraction;
    case Archetype::Convergent: return Pattern::Convergent;
    case Archetype::Wandering: return Pattern::Wandering;
    }
    return Pattern::Other;
}

inline std::string to_string(Archetype a) { return to_string(pattern_of(a)); }

inline Archetype archetype_from_string(const std::string& s) {
    for (auto a : kArchetypes) {
        if (to_string(a) == s) {
            return a;
        }
    }
    throw Error(ErrorCode::MalformedDocument, "unknown archetype '" + s + "'");
}

/// Seeded generator with platform-independent draws.
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : engine_(seed) {}

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[index(v.size())];
    }

private:
    std::mt19937_64 engine_;
};

/// Builds a valid inbetween trace by driving the catalog engine.
class TraceBuilder {
public:
    TraceBuilder(const DesignSpace& space, std::string sessionId, std::string userId, std::string taskId,
                 std::uint64_t seed)
        : space_(space), rng_(seed) {
        trace_.sessionId = std::move(sessionId);
        trace_.userId = std::move(userId);
        trace_.taskId = std::move(taskId);
        trace_.interfaceKind = InterfaceKind::Inbetween;
        trace_.spaceHash = space.spaceHash;
        emit(EventKind::SessionStart, {}, 0);
    }

    SimRng& rng() { return rng_; }
    const DisplayState& state() const { return *state_; }

    std::vector<DesignCoords> shown() const {
        std::vector<DesignCoords> out;
        for (const auto& d : state_->shown) {
            out.push_back(d.coords);
        }
        return out;
    }

    void category(CornerMask corner) {
        state_ = select_category(space_, corner);
        emit(EventKind::CategorySelect, corner_coords(corner), rng_.between(800, 4000));
    }
    void hover(const DesignCoords& c) {
        (void)hover_preview(*state_, c);
        emit(EventKind::Hover, c, rng_.between(50, 1500));
    }
    void zoom(const DesignCoords& c) {
        state_ = zoom_in(*state_, c);
        emit(EventKind::ZoomIn, c, rng_.between(200, 2500));
    }
    void click_on(const DesignCoords& c) {
        state_ = click(*state_, c);
        emit(EventKind::Click, c, rng_.between(200, 2000));
    }
    void fine_tune_to(int axis, double value) {
        state_ = fine_tune(*state_, *state_->fineTuneTarget, axis, value).state;
        emit(EventKind::FineTune, AxisValue{axis, value}, rng_.between(100, 1500));
    }
    void text_edit(std::string text) { emit(EventKind::TextEdit, TextPayload{std::move(text)}, rng_.between(500, 3000)); }
    void download() { emit(EventKind::Download, *current_coords(state_), rng_.between(300, 3000)); }

    SessionTrace finish() { return std::move(trace_); }

private:
    void emit(EventKind kind, EventPayload payload, std::int64_t dt) {
        t_ += dt;
        trace_.events.push_back(make_event(static_cast<std::int64_t>(trace_.events.size()) + 1, t_, kind,
                                           std::move(payload)));
    }

    const DesignSpace& space_;
    SimRng rng_;
    SessionTrace trace_;
    std::optional<DisplayState> state_;
    std::int64_t t_ = 0;
};

namespace detail {

inline constexpr const char* kSampleTexts[] = {"noon", "lion", "oil", "nil", "loin"};

/// Value on a 1/64 grid so that fine-tune values are short and exact.
inline double grid_value(SimRng& rng, double lo, double hi) {
    const int steps = static_cast<int>(std::floor((hi - lo) * 64.0));
    return lo + static_cast<double>(rng.index(static_cast<std::size_t>(steps) + 1)) / 64.0;
}

inline void maybe_hover(TraceBuilder& b, int maxCount) {
    const int n = static_cast<int>(b.rng().index(static_cast<std::size_t>(maxCount) + 1));
    for (int i = 0; i < n; ++i) {
        b.hover(b.rng().pick(b.shown()));
    }
}

inline void refine_and_download(TraceBuilder& b, int minTunes, int maxTunes,
                                const std::optional<DesignCoords>& anchor, double radius) {
    const int tunes = static_cast<int>(b.rng().between(minTunes, maxTunes));
    for (int i = 0; i < tunes; ++i) {
        const int axis = static_cast<int>(b.rng().index(3));
        double lo = 0.0;
        double hi = 1.0;
        if (anchor) {
            lo = std::max(0.0, (*anchor)[axis] - radius);
            hi = std::min(1.0, (*anchor)[axis] + radius);
        }
        b.fine_tune_to(axis, grid_value(b.rng(), lo, hi));
    }
    if (b.rng().index(2) == 0) {
        b.text_edit(kSampleTexts[b.rng().index(std::size(kSampleTexts))]);
    }
    b.download();
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

inline std::string simulated_session_id(const std::string& userId, const std::string& taskId, std::uint64_t seed) {
    return userId + "-" + taskId + "-" + std::to_string(seed);
}

/// Emits a valid trace that classify() labels with the requested archetype.
inline SessionTrace simulate_trace(const DesignSpace& space, Archetype archetype, const std::string& taskId,
                                   const std::string& userId, std::uint64_t seed) {
    TraceBuilder b(space, simulated_session_id(userId, taskId, seed), userId, taskId, seed);
    auto& rng = b.rng();
    const CornerMask corner = space.startCorners[rng.index(2)].corner;
    const DesignCoords start = corner_coords(corner);
    b.category(corner);

    switch (archetype) {
    case Archetype::NonSelection: {
        detail::maybe_hover(b, 4);
        b.click_on(rng.pick(b.shown()));
        detail::refine_and_download(b, 0, 2, std::nullopt, 1.0);
        break;
    }
    case Archetype::MinimalInteraction: {
        detail::maybe_hover(b, 2);
        b.zoom(rng.pick(b.shown()));
        b.click_on(rng.pick(b.shown()));
        detail::refine_and_download(b, 1, 3, std::nullopt, 1.0);
        break;
    }
    case Archetype::Convergent: {
        b.hover(start);
        b.zoom(start);
        std::set<int> octants{octant(start)};
        const int extra = static_cast<int>(rng.between(1, 2));
        for (int z = 0; z < extra; ++z) {
            std::vector<DesignCoords> candidates;
            for (const auto& c : b.shown()) {
                std::set<int> with = octants;
                with.insert(octant(c));
                if (distance_linf(c, start) <= 0.5 && with.size() <= 2) {
                    candidates.push_back(c);
                }
            }
            const auto focus = rng.pick(candidates);
            b.hover(focus);
            b.zoom(focus);
            octants.insert(octant(focus));
        }
        std::vector<DesignCoords> near;
        for (const auto& c : b.shown()) {
            if (distance_linf(c, start) <= 0.5) {
                near.push_back(c);
            }
        }
        b.click_on(rng.pick(near));
        detail::refine_and_download(b, 0, 3, start, 0.5);
        break;
    }
    case Archetype::Wandering: {
        std::set<int> octants;
        for (int z = 0; z < kMaxZoomLevel; ++z) {
            std::vector<DesignCoords> candidates;
            for (const auto& c : b.shown()) {
                if (!octants.count(octant(c)) && !(z == 0 && c == start)) {
                    candidates.push_back(c);
                }
            }
            const auto focus = rng.pick(candidates);
            detail::maybe_hover(b, 1);
            b.zoom(focus);
            octants.insert(octant(focus));
        }
        b.click_on(rng.pick(b.shown()));
        detail::refine_and_download(b, 0, 2, std::nullopt, 1.0);
        break;
    }
    }
    return b.finish();
}

/// Cohort of users x tasks; each user keeps one archetype across tasks.
inline std::vector<SessionTrace> simulate_cohort(const DesignSpace& space, int users, int tasks, std::uint64_t seed) {
    std::vector<SessionTrace> out;
    for (int u = 0; u < users; ++u) {
        SimRng userRng(detail::mix_seed(seed, static_cast<std::uint64_t>(u)));
        const Archetype a = kArchetypes[userRng.index(std::size(kArchetypes))];
        for (int t = 0; t < tasks; ++t) {
            const auto traceSeed = detail::mix_seed(seed, 1000003ULL * (u + 1) + static_cast<std::uint64_t>(t));
            auto trace = simulate_trace(space, a, "T" + std::to_string(t + 1), "U" + std::to_string(u + 1), traceSeed);
            out.push_back(std::move(trace));
        }
    }
    return out;
}

/// One trace per user, all zooming into the octant of `corner`.
inline std::vector<SessionTrace> simulate_shared_octant_cohort(const DesignSpace& space, const std::string& taskId,
                                                               int users, CornerMask corner, std::uint64_t seed) {
    std::vector<SessionTrace> out;
    const DesignCoords target = corner_coords(corner);
    for (int u = 0; u < users; ++u) {
        const auto s = detail::mix_seed(seed, static_cast<std::uint64_t>(u));
        const std::string userId = "U" + std::to_string(u + 1);
        TraceBuilder b(space, simulated_session_id(userId, taskId, s), userId, taskId, s);
        auto& rng = b.rng();
        // The target corner is hidden only when it is the antipode of the start.
        std::vector<CornerMask> starts;
        for (const auto& sc : space.startCorners) {
            if ((sc.corner ^ corner) != 7) {
                starts.push_back(sc.corner);
            }
        }
        b.category(rng.pick(starts));
        detail::maybe_hover(b, 2);
        b.zoom(target);
        auto in_octant = [&] {
            std::vector<DesignCoords> near;
            for (const auto& c : b.shown()) {
                if (octant(c) == octant(target)) {
                    near.push_back(c);
                }
            }
            return near;
        };
        if (rng.index(2) == 0) {
            b.zoom(rng.pick(in_octant()));
        }
        b.click_on(rng.pick(in_octant()));
        b.download();
        out.push_back(b.finish());
    }
    return out;
}

/// One trace per user; every choice (start, foci, zoom depth) uniformly random.
inline std::vector<SessionTrace> simulate_random_cohort(const DesignSpace& space, const std::string& taskId, int users,
                                                        std::uint64_t seed) {
    std::vector<SessionTrace> out;
    for (int u = 0; u < users; ++u) {
        const auto s = detail::mix_seed(seed, static_cast<std::uint64_t>(u));
        const std::string userId = "U" + std::to_string(u + 1);
        TraceBuilder b(space, simulated_session_id(userId, taskId, s), userId, taskId, s);
        auto& rng = b.rng();
        b.category(space.startCorners[rng.index(2)].corner);
        const int zooms = static_cast<int>(rng.between(1, kMaxZoomLevel));
        for (int z = 0; z < zooms; ++z) {
            b.zoom(rng.pick(b.shown()));
        }
        b.click_on(rng.pick(b.shown()));
        b.download();
        out.push_back(b.finish());
    }
    return out;
}

/// Control-interface trace: `moves` are (axis, value) slider positions.
inline SessionTrace make_control_trace(const DesignSpace& space, const std::string& sessionId,
                                       const std::string& userId, const std::string& taskId,
                                       const std::vector<AxisValue>& moves, bool download = true) {
    SessionTrace t;
    t.sessionId = sessionId;
    t.userId = userId;
    t.taskId = taskId;
    t.interfaceKind = InterfaceKind::Control;
    t.spaceHash = space.spaceHash;
    std::int64_t seq = 1;
    std::int64_t tMs = 0;
    t.events.push_back(make_event(seq++, tMs, EventKind::SessionStart));
    DesignCoords sliders;
    for (const auto& m : moves) {
        tMs += 120;
        t.events.push_back(make_event(seq++, tMs, EventKind::SliderMove, m));
        sliders = sliders.with(static_cast<std::size_t>(m.axis), m.value);
    }
    if (download) {
        t.events.push_back(make_event(seq++, tMs + 500, EventKind::Download, sliders));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Cohort report
// ---------------------------------------------------------------------------

struct TraceAnalysis {
    std::string sessionId;
    std::string userId;
    std::string taskId;
    InterfaceKind interfaceKind = InterfaceKind::Inbetween;
    std::optional<PatternReport> patterns;  // inbetween traces with a Download
    std::optional<SweepReport> sweeps;      // control traces
};

struct CohortReport {
    std::map<std::string, double> perUserCoherence;
    std::map<std::string, double> perTaskOverlap;
    std::map<std::string, int> perUserTraceCount;
    std::map<std::string, int> perTaskTraceCount;
    std::vector<TraceAnalysis> perTrace;  // sorted by sessionId
};

inline constexpr int kReportVersion = 1;

inline CohortReport cohort_report(std::span<const SessionTrace> traces, const AnalyticsConfig& cfg = {}) {
    CohortReport report;
    std::vector<SessionTrace> classifiable;
    for (const auto* t : detail::sorted_traces(traces)) {
        TraceAnalysis a{t->sessionId, t->userId, t->taskId, t->interfaceKind, std::nullopt, std::nullopt};
        if (t->interfaceKind == InterfaceKind::Control) {
            a.sweeps = detect_extreme_sweeps(*t, cfg);
        } else if (std::any_of(t->events.begin(), t->events.end(),
                               [](const auto& e) { return e.kind == EventKind::Download; })) {
            a.patterns = classify(*t, cfg);
            classifiable.push_back(*t);
        }
        report.perTrace.push_back(std::move(a));
    }
    std::sort(report.perTrace.begin(), report.perTrace.end(),
              [](const auto& a, const auto& b) { return a.sessionId < b.sessionId; });

    std::vector<FeatureVector> corpus;
    std::map<std::string, std::vector<SessionTrace>> byUser;
    std::map<std::string, std::vector<SessionTrace>> byTask;
    for (const auto& t : classifiable) {
        corpus.push_back(trace_features(t).vector());
        byUser[t.userId].push_back(t);
        byTask[t.taskId].push_back(t);
    }
    const auto stats = corpus_stats(corpus);
    for (const auto& [user, ts] : byUser) {
        report.perUserTraceCount[user] = static_cast<int>(ts.size());
        if (ts.size() >= 2) {
            report.perUserCoherence[user] = coherence_score(ts, stats);
        }
    }
    for (const auto& [task, ts] : byTask) {
        report.perTaskTraceCount[task] = static_cast<int>(ts.size());
        if (ts.size() >= 2) {
            report.perTaskOverlap[task] = within_task_overlap(ts, cfg);
        }
    }
    return report;
}

inline nlohmann::json to_json(const PatternReport& p) {
    nlohmann::json labels = nlohmann::json::array();
    for (auto l : p.labels) {
        labels.push_back(to_string(l));
    }
    const auto& f = p.features;
    return {{"labels", labels},
            {"features",
             {{"zoomCount", f.zoomCount},
              {"octantCount", f.octantCount},
              {"pathLength", f.pathLength},
              {"endStartDistLinf", f.endStartDistLinf},
              {"fineTuneCount", f.fineTuneCount},
              {"startCorner", f.startCorner}}}};
}

inline nlohmann::json to_json(const SweepReport& s) {
    return {{"sweeps", s.sweeps}, {"total", s.total()}, {"blindSelection", s.blindSelection}};
}

/// Analysis report document: perTrace, perUser and perTask sections.
inline nlohmann::json to_json(const CohortReport& r) {
    nlohmann::json doc;
    doc["v"] = kReportVersion;
    doc["perTrace"] = nlohmann::json::array();
    for (const auto& a : r.perTrace) {
        nlohmann::json j = {{"sessionId", a.sessionId},
                            {"userId", a.userId},
                            {"taskId", a.taskId},
                            {"interfaceKind", to_string(a.interfaceKind)}};
        if (a.patterns) {
            j["patterns"] = to_json(*a.patterns);
        }
        if (a.sweeps) {
            j["sweeps"] = to_json(*a.sweeps);
        }
        doc["perTrace"].push_back(std::move(j));
    }
    doc["perUser"] = nlohmann::json::object();
    for (const auto& [user, n] : r.perUserTraceCount) {
        auto& u = doc["perUser"][user];
        u["traces"] = n;
        auto it = r.perUserCoherence.find(user);
        u["coherence"] = it == r.perUserCoherence.end() ? nlohmann::json(nullptr) : nlohmann::json(it->second);
    }
    doc["perTask"] = nlohmann::json::object();
    for (const auto& [task, n] : r.perTaskTraceCount) {
        auto& t = doc["perTask"][task];
        t["traces"] = n;
        auto it = r.perTaskOverlap.find(task);
        t["overlap"] = it == r.perTaskOverlap.end() ? nlohmann::json(nullptr) : nlohmann::json(it->second);
    }
    return doc;
}

} // namespace inbetween
