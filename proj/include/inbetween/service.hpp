#pragma once

// Transport-independent JSON API. `Api::handle` maps (method, path, query,
// body) to a response; the HTTP adapter in service_http.hpp only forwards.

#include "inbetween/catalog_engine.hpp"
#include "inbetween/glyph_space.hpp"
#include "inbetween/render_svg.hpp"
#include "inbetween/session_log.hpp"
#include "inbetween/trace_analytics.hpp"

#include <nlohmann/json.hpp>

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace inbetween {

inline constexpr int kApiVersion = 1;

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string contentType = "application/json";

    nlohmann::json json() const { return nlohmann::json::parse(body); }
};

inline int http_status(ErrorCode code) {
    switch (error_class(code)) {
    case ErrorClass::Validation: return 400;
    case ErrorClass::NotFound: return 404;
    case ErrorClass::Conflict: return 409;
    case ErrorClass::Io: return 500;
    }
    return 500;
}

/// ApiError document.
inline nlohmann::json error_document(const Error& e) {
    nlohmann::json err = {{"code", std::string(code_name(e.code()))}, {"message", e.what()}};
    if (!e.detail().is_null()) {
        err["detail"] = e.detail();
    }
    return {{"v", kApiVersion}, {"error", err}};
}

/// Single-instance document: the space schema with all eight masters equal to
/// the instance outline, plus the instance coordinates and descriptor.
inline nlohmann::json instance_document(const DesignSpace& space, const DesignCoords& coords) {
    DesignSpace inst;
    inst.axes = space.axes;
    inst.startCorners = space.startCorners;
    for (const auto& [name, masters] : space.glyphs) {
        const auto g = interpolate_glyph(space, name, coords);
        MasterSet set;
        set.fill(g);
        inst.glyphs.emplace(name, set);
    }
    auto doc = to_document(inst);
    const auto words = descriptor_words(space, coords);
    doc["instance"] = {{"coords", {coords[0], coords[1], coords[2]}},
                       {"descriptor", {words[0], words[1], words[2]}},
                       {"sourceSpaceHash", space.spaceHash}};
    return doc;
}

class Api {
public:
    using Query = std::map<std::string, std::string>;

    Api(DesignSpace space, const std::filesystem::path& dataDir)
        : space_(std::move(space)), store_(std::make_unique<SessionStore>(dataDir)) {}

    const DesignSpace& space() const { return space_; }
    SessionStore& store() { return *store_; }

    ApiResponse handle(const std::string& method, const std::string& path, const Query& query = {},
                       const std::string& body = {}) {
        try {
            return route(method, path, query, body);
        } catch (const Error& e) {
            return {http_status(e.code()), error_document(e).dump()};
        } catch (const nlohmann::json::exception& e) {
            return {400, error_document(Error(ErrorCode::MalformedDocument, e.what())).dump()};
        }
    }

private:
    static ApiResponse ok(const nlohmann::json& j, int status = 200) { return {status, j.dump()}; }

    static std::vector<std::string> split_path(const std::string& path) {
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (pos <= path.size()) {
            const auto next = path.find('/', pos);
            const auto part = path.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            if (!part.empty()) {
                parts.push_back(part);
            }
            if (next == std::string::npos) {
                break;
            }
            pos = next + 1;
        }
        return parts;
    }

    static std::string param(const Query& q, const std::string& key) {
        auto it = q.find(key);
        if (it == q.end()) {
            throw Error(ErrorCode::MalformedDocument, "missing query parameter '" + key + "'", {{"param", key}});
        }
        return it->second;
    }

    static double number(const Query& q, const std::string& key, ErrorCode code = ErrorCode::MalformedDocument) {
        const auto text = param(q, key);
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(text.c_str(), &end);
        if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
            throw Error(code, "query parameter '" + key + "' is not a number", {{"param", key}});
        }
        return v;
    }

    static double number_or(const Query& q, const std::string& key, double fallback) {
        return q.count(key) ? number(q, key) : fallback;
    }

    static DesignCoords coords(const Query& q) {
        const std::array<double, 3> c = {number(q, "x", ErrorCode::InvalidCoords),
                                         number(q, "y", ErrorCode::InvalidCoords),
                                         number(q, "z", ErrorCode::InvalidCoords)};
        for (double v : c) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw Error(ErrorCode::InvalidCoords, "coordinates must lie in [0,1]", {{"coords", c}});
            }
        }
        return DesignCoords(c[0], c[1], c[2]);
    }

    static nlohmann::json coords_json(const DesignCoords& c) { return {c[0], c[1], c[2]}; }

    ApiResponse route(const std::string& method, const std::string& path, const Query& q, const std::string& body) {
        const auto p = split_path(path);
        if (p.empty() || p[0] != "api") {
            throw Error(ErrorCode::UnknownRoute, "no route for " + method + " " + path, {{"path", path}});
        }
        auto is = [&](const char* m, std::initializer_list<const char*> shape) {
            if (method != m || p.size() != shape.size()) {
                return false;
            }
            std::size_t i = 0;
            for (const char* s : shape) {
                if (std::string(s) != "*" && p[i] != s) {
                    return false;
                }
                ++i;
            }
            return true;
        };

        if (is("GET", {"api", "space"})) {
            return get_space();
        }
        if (is("GET", {"api", "instance"})) {
            return get_instance(q);
        }
        if (is("GET", {"api", "text"})) {
            return get_text(q);
        }
        if (is("GET", {"api", "neighbors"})) {
            return get_neighbors(q);
        }
        if (is("GET", {"api", "download"})) {
            return get_download(q);
        }
        if (is("POST", {"api", "session"})) {
            return post_session(body);
        }
        if (is("POST", {"api", "session", "*", "events"})) {
            return post_events(p[2], body);
        }
        if (is("POST", {"api", "session", "*", "close"})) {
            store_->close_session(p[2]);
            return ok({{"v", kApiVersion}, {"sessionId", p[2]}, {"closed", true}});
        }
        if (is("GET", {"api", "session", "*"})) {
            auto trace = to_json(store_->load_trace(p[2]));
            return ok({{"v", kApiVersion}, {"trace", trace}, {"closed", store_->is_closed(p[2])}});
        }
        if (is("GET", {"api", "analysis", "session", "*"})) {
            return get_session_analysis(p[3]);
        }
        if (is("GET", {"api", "analysis", "cohort"})) {
            return get_cohort_analysis(q);
        }
        throw Error(ErrorCode::UnknownRoute, "no route for " + method + " " + path, {{"path", path}});
    }

    ApiResponse get_space() const {
        nlohmann::json axes = nlohmann::json::array();
        for (const auto& a : space_.axes) {
            axes.push_back({{"name", a.name}, {"low", a.wordLow}, {"mid", a.wordMid}, {"high", a.wordHigh}});
        }
        nlohmann::json categories = nlohmann::json::array();
        for (const auto& o : open_catalog(space_).options) {
            categories.push_back({{"corner", o.corner}, {"labels", {o.labels[0], o.labels[1]}}});
        }
        nlohmann::json glyphs = nlohmann::json::array();
        for (const auto& [name, masters] : space_.glyphs) {
            glyphs.push_back(name);
        }
        return ok({{"v", kApiVersion},
                   {"axes", axes},
                   {"categories", categories},
                   {"glyphs", glyphs},
                   {"spaceHash", space_.spaceHash}});
    }

    ApiResponse get_instance(const Query& q) const {
        const auto name = param(q, "glyph");
        const auto c = coords(q);
        const auto g = interpolate_glyph(space_, name, c);
        const auto words = descriptor_words(space_, c);
        return ok({{"v", kApiVersion},
                   {"glyph", name},
                   {"coords", coords_json(c)},
                   {"descriptor", {words[0], words[1], words[2]}},
                   {"outline", outline_to_json(g)},
                   {"svg", svg::glyph_svg(g, number_or(q, "size", 200.0))}});
    }

    ApiResponse get_text(const Query& q) const {
        const auto c = coords(q);
        const double size = number_or(q, "size", 72.0);
        const auto layout = svg::text_svg(space_, c, param(q, "text"), size, number_or(q, "letterSpacing", 0.0),
                                          number_or(q, "lineSpacing", size * 1.2));
        return ok({{"v", kApiVersion},
                   {"coords", coords_json(c)},
                   {"svg", layout.svg},
                   {"warnings", layout.warnings},
                   {"lineWidths", layout.lineWidths}});
    }

    ApiResponse get_neighbors(const Query& q) const {
        const auto c = coords(q);
        const double lv = number(q, "level");
        if (lv != std::floor(lv) || lv < 0 || lv > kMaxZoomLevel) {
            throw Error(ErrorCode::ValueOutOfRange, "level must be an integer in [0,3]", {{"level", lv}});
        }
        nlohmann::json out = nlohmann::json::array();
        for (const auto& n : neighbors_at_level(c, static_cast<int>(lv))) {
            out.push_back(coords_json(n));
        }
        return ok({{"v", kApiVersion}, {"coords", coords_json(c)}, {"level", static_cast<int>(lv)}, {"neighbors", out}});
    }

    ApiResponse get_download(const Query& q) const {
        const auto c = coords(q);
        if (q.count("format") && q.at("format") == "svg") {
            std::string text;
            for (const auto& [name, masters] : space_.glyphs) {
                if (svg::utf8_chars(name).size() == 1) {
                    text += name;
                }
            }
            return {200, svg::text_svg(space_, c, text, 96.0, 8.0, 120.0).svg, "image/svg+xml"};
        }
        return ok(instance_document(space_, c));
    }

    ApiResponse post_session(const std::string& body) {
        auto j = nlohmann::json::parse(body);
        if (!j.contains("spaceHash")) {
            j["spaceHash"] = space_.spaceHash;
        }
        j["v"] = kDocumentVersion;
        const auto header = header_from_json(j);
        if (header.spaceHash != space_.spaceHash) {
            throw Error(ErrorCode::HashMismatch, "session targets a different design space",
                        {{"expected", space_.spaceHash}, {"actual", header.spaceHash}});
        }
        store_->create_session(header);
        return ok({{"v", kApiVersion}, {"sessionId", header.sessionId}}, 201);
    }

    /// Batch append. The stored trace plus the new events must replay; nothing
    /// is written when any event is rejected. Resent events are acknowledged.
    ApiResponse post_events(const std::string& sessionId, const std::string& body) {
        const auto j = nlohmann::json::parse(body);
        std::vector<SessionEvent> incoming;
        for (const auto& e : j.at("events")) {
            incoming.push_back(event_from_json(e));
        }
        std::lock_guard lock(batch_mutex(sessionId));
        auto candidate = store_->load_trace(sessionId);
        const auto storedCount = candidate.events.size();
        std::vector<SessionEvent> fresh;
        int duplicates = 0;
        const auto storedEnd = candidate.events.begin() + static_cast<std::ptrdiff_t>(storedCount);
        for (const auto& e : incoming) {
            auto it = std::find_if(candidate.events.begin(), storedEnd, [&](const auto& s) { return s.seq == e.seq; });
            if (it != storedEnd) {
                if (!(*it == e)) {
                    throw Error(ErrorCode::SequenceGap, "sequence regression", {{"seq", e.seq}});
                }
                ++duplicates;
                continue;
            }
            fresh.push_back(e);
        }
        if (!fresh.empty()) {
            if (store_->is_closed(sessionId)) {
                throw Error(ErrorCode::ClosedSession, "session '" + sessionId + "' is closed");
            }
            std::int64_t expected = storedCount ? candidate.events.back().seq + 1 : 1;
            for (const auto& e : fresh) {
                if (e.seq != expected) {
                    throw Error(ErrorCode::SequenceGap, e.seq < expected ? "sequence regression" : "sequence gap",
                                {{"seq", e.seq}, {"expected", expected}});
                }
                ++expected;
                candidate.events.push_back(e);
            }
            (void)replay(space_, candidate);
            for (const auto& e : fresh) {
                store_->append_event(sessionId, e);
            }
        }
        return ok({{"v", kApiVersion},
                   {"sessionId", sessionId},
                   {"appended", fresh.size()},
                   {"duplicates", duplicates},
                   {"lastSeq", candidate.events.empty() ? 0 : candidate.events.back().seq}});
    }

    ApiResponse get_session_analysis(const std::string& sessionId) {
        const auto trace = store_->load_trace(sessionId);
        nlohmann::json out = {{"v", kApiVersion}, {"sessionId", sessionId}, {"interfaceKind", to_string(trace.interfaceKind)}};
        if (trace.interfaceKind == InterfaceKind::Control) {
            out["sweeps"] = to_json(detect_extreme_sweeps(trace));
            return ok(out);
        }
        out["patterns"] = to_json(classify(trace));
        nlohmann::json areas = nlohmann::json::array();
        for (const auto& a : interest_areas(trace)) {
            areas.push_back({{"center", coords_json(a.center)}, {"halfWidth", a.halfWidth}});
        }
        out["interestAreas"] = areas;
        const auto tree = build_tree(trace);
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : tree.nodes) {
            nodes.push_back({{"coords", coords_json(n.coords)},
                             {"level", n.level},
                             {"seq", n.firstSeq},
                             {"parent", n.parent ? nlohmann::json(*n.parent) : nlohmann::json(nullptr)}});
        }
        out["tree"] = {{"nodes", nodes}, {"traversalOrder", tree.traversalOrder}};
        return ok(out);
    }

    ApiResponse get_cohort_analysis(const Query& q) {
        std::vector<SessionTrace> traces;
        for (const auto& id : store_->session_ids()) {
            auto t = store_->load_trace(id);
            if (q.count("task") && t.taskId != q.at("task")) {
                continue;
            }
            if (q.count("user") && t.userId != q.at("user")) {
                continue;
            }
            traces.push_back(std::move(t));
        }
        return ok(to_json(cohort_report(traces)));
    }

    std::mutex& batch_mutex(const std::string& sessionId) {
        std::lock_guard lock(batchMutexesGuard_);
        auto& m = batchMutexes_[sessionId];
        if (!m) {
            m = std::make_unique<std::mutex>();
        }
        return *m;
    }

    DesignSpace space_;
    std::unique_ptr<SessionStore> store_;
    std::mutex batchMutexesGuard_;
    std::map<std::string, std::unique_ptr<std::mutex>> batchMutexes_;
};

} // namespace inbetween
