#pragma once

// Selection-process recording: the event model, an append-only file store
// (one NDJSON file per session plus an append-only index), and deterministic
// replay through the catalog engine.

#include "inbetween/catalog_engine.hpp"
#include "inbetween/glyph_space.hpp"

#include <nlohmann/json.hpp>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace inbetween {

enum class EventKind {
    SessionStart,
    CategorySelect,
    Hover,
    ZoomIn,
    Click,
    FineTune,
    TextEdit,
    DisplayToggle,
    SliderMove,
    Download,
    Reset,
};

enum class InterfaceKind { Inbetween, Control };

enum class ToggleId { Contrast, ShowAll, StartCorner };

struct AxisValue {
    int axis = 0;
    double value = 0.0;

    bool operator==(const AxisValue&) const = default;
};

struct TextPayload {
    std::string text;

    bool operator==(const TextPayload&) const = default;
};

using EventPayload = std::variant<std::monostate, DesignCoords, AxisValue, ToggleId, TextPayload>;

struct SessionEvent {
    std::int64_t seq = 0;
    std::int64_t tMs = 0;
    EventKind kind = EventKind::SessionStart;
    EventPayload payload;

    bool operator==(const SessionEvent&) const = default;

    const DesignCoords& coords() const { return std::get<DesignCoords>(payload); }
    const AxisValue& axis_value() const { return std::get<AxisValue>(payload); }
};

struct SessionTrace {
    std::string sessionId;
    std::string userId;
    std::string taskId;
    InterfaceKind interfaceKind = InterfaceKind::Inbetween;
    std::string spaceHash;
    std::vector<SessionEvent> events;

    bool operator==(const SessionTrace&) const = default;
};

// ---------------------------------------------------------------------------
// Names and payload shapes
// ---------------------------------------------------------------------------

inline constexpr std::pair<EventKind, const char*> kEventKindNames[] = {
    {EventKind::SessionStart, "SessionStart"}, {EventKind::CategorySelect, "CategorySelect"},
    {EventKind::Hover, "Hover"},               {EventKind::ZoomIn, "ZoomIn"},
    {EventKind::Click, "Click"},               {EventKind::FineTune, "FineTune"},
    {EventKind::TextEdit, "TextEdit"},         {EventKind::DisplayToggle, "DisplayToggle"},
    {EventKind::SliderMove, "SliderMove"},     {EventKind::Download, "Download"},
    {EventKind::Reset, "Reset"},
};

inline std::string to_string(EventKind k) {
    for (const auto& [kind, name] : kEventKindNames) {
        if (kind == k) {
            return name;
        }
    }
    return "?";
}

inline EventKind event_kind_from_string(const std::string& s) {
    for (const auto& [kind, name] : kEventKindNames) {
        if (s == name) {
            return kind;
        }
    }
    throw Error(ErrorCode::MalformedDocument, "unknown event kind '" + s + "'");
}

inline std::string to_string(InterfaceKind k) { return k == InterfaceKind::Inbetween ? "inbetween" : "control"; }

inline InterfaceKind interface_kind_from_string(const std::string& s) {
    if (s == "inbetween") {
        return InterfaceKind::Inbetween;
    }
    if (s == "control") {
        return InterfaceKind::Control;
    }
    throw Error(ErrorCode::MalformedDocument, "unknown interface kind '" + s + "'");
}

inline std::string to_string(ToggleId t) {
    switch (t) {
    case ToggleId::Contrast: return "contrast";
    case ToggleId::ShowAll: return "show_all";
    case ToggleId::StartCorner: return "start_corner";
    }
    return "?";
}

inline ToggleId toggle_from_string(const std::string& s) {
    for (auto t : {ToggleId::Contrast, ToggleId::ShowAll, ToggleId::StartCorner}) {
        if (to_string(t) == s) {
            return t;
        }
    }
    throw Error(ErrorCode::MalformedDocument, "unknown toggle '" + s + "'");
}

/// Payload alternative index expected for each kind.
inline std::size_t payload_index_for(EventKind k) {
    switch (k) {
    case EventKind::CategorySelect:
    case EventKind::Hover:
    case EventKind::ZoomIn:
    case EventKind::Click:
    case EventKind::Download:
        return 1;
    case EventKind::FineTune:
    case EventKind::SliderMove:
        return 2;
    case EventKind::DisplayToggle:
        return 3;
    case EventKind::TextEdit:
        return 4;
    default:
        return 0;
    }
}

// Convenience constructors.
inline SessionEvent make_event(std::int64_t seq, std::int64_t tMs, EventKind kind, EventPayload payload = {}) {
    return {seq, tMs, kind, std::move(payload)};
}

// ---------------------------------------------------------------------------
// Canonical JSON
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const SessionEvent& e) {
    nlohmann::json j = {{"seq", e.seq}, {"tMs", e.tMs}, {"kind", to_string(e.kind)}};
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, DesignCoords>) {
                j["coords"] = p.values();
            } else if constexpr (std::is_same_v<T, AxisValue>) {
                j["axis"] = p.axis;
                j["value"] = p.value;
            } else if constexpr (std::is_same_v<T, ToggleId>) {
                j["toggle"] = to_string(p);
            } else if constexpr (std::is_same_v<T, TextPayload>) {
                j["text"] = p.text;
            }
        },
        e.payload);
    return j;
}

inline SessionEvent event_from_json(const nlohmann::json& j) {
    try {
        SessionEvent e;
        e.seq = j.at("seq").get<std::int64_t>();
        e.tMs = j.at("tMs").get<std::int64_t>();
        e.kind = event_kind_from_string(j.at("kind").get<std::string>());
        switch (payload_index_for(e.kind)) {
        case 1: {
            const auto c = j.at("coords");
            if (!c.is_array() || c.size() != 3) {
                throw Error(ErrorCode::MalformedDocument, "coords must be a triple");
            }
            std::array<double, 3> v{};
            for (std::size_t i = 0; i < 3; ++i) {
                v[i] = c[i].get<double>();
                if (!(v[i] >= 0.0 && v[i] <= 1.0)) {
                    throw Error(ErrorCode::InvalidCoords, "event coords outside [0,1]");
                }
            }
            e.payload = DesignCoords(v);
            break;
        }
        case 2:
            e.payload = AxisValue{j.at("axis").get<int>(), j.at("value").get<double>()};
            break;
        case 3:
            e.payload = toggle_from_string(j.at("toggle").get<std::string>());
            break;
        case 4:
            e.payload = TextPayload{j.at("text").get<std::string>()};
            break;
        default:
            break;
        }
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::MalformedDocument, std::string("malformed event: ") + ex.what());
    }
}

inline nlohmann::json header_to_json(const SessionTrace& t) {
    return {{"v", kDocumentVersion},         {"sessionId", t.sessionId}, {"userId", t.userId},
            {"taskId", t.taskId},            {"interfaceKind", to_string(t.interfaceKind)},
            {"spaceHash", t.spaceHash}};
}

inline SessionTrace header_from_json(const nlohmann::json& j) {
    try {
        SessionTrace t;
        t.sessionId = j.at("sessionId").get<std::string>();
        t.userId = j.at("userId").get<std::string>();
        t.taskId = j.at("taskId").get<std::string>();
        t.interfaceKind = interface_kind_from_string(j.at("interfaceKind").get<std::string>());
        t.spaceHash = j.at("spaceHash").get<std::string>();
        return t;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::MalformedDocument, std::string("malformed session header: ") + ex.what());
    }
}

inline nlohmann::json to_json(const SessionTrace& t) {
    auto j = header_to_json(t);
    j["events"] = nlohmann::json::array();
    for (const auto& e : t.events) {
        j["events"].push_back(to_json(e));
    }
    return j;
}

inline SessionTrace trace_from_json(const nlohmann::json& j) {
    auto t = header_from_json(j);
    if (j.contains("events")) {
        for (const auto& e : j.at("events")) {
            t.events.push_back(event_from_json(e));
        }
    }
    return t;
}

/// Sorted keys, compact, round-trip floating point.
inline std::string canonical_text(const SessionTrace& t) { return to_json(t).dump(); }

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Checks `next` against the events already accepted for a trace with the given
/// interface. Throws OrderViolation / WrongInterface / MalformedDocument.
inline void check_next_event(InterfaceKind iface, const std::vector<SessionEvent>& prior, const SessionEvent& next) {
    if (next.payload.index() != payload_index_for(next.kind)) {
        throw Error(ErrorCode::MalformedDocument, "payload does not match event kind " + to_string(next.kind),
                    {{"seq", next.seq}});
    }
    if (prior.empty()) {
        if (next.kind != EventKind::SessionStart) {
            throw Error(ErrorCode::OrderViolation, "first event must be SessionStart", {{"seq", next.seq}});
        }
    } else {
        const auto& last = prior.back();
        if (next.seq <= last.seq) {
            throw Error(ErrorCode::SequenceGap, "sequence regression", {{"seq", next.seq}, {"last", last.seq}});
        }
        if (next.tMs < last.tMs) {
            throw Error(ErrorCode::OrderViolation, "timestamps must be non-decreasing", {{"seq", next.seq}});
        }
        if (next.kind == EventKind::SessionStart) {
            throw Error(ErrorCode::OrderViolation, "SessionStart may only appear first", {{"seq", next.seq}});
        }
        const bool downloaded = std::any_of(prior.begin(), prior.end(),
                                            [](const auto& e) { return e.kind == EventKind::Download; });
        if (downloaded && next.kind != EventKind::Reset) {
            throw Error(ErrorCode::OrderViolation, "only Reset may follow Download", {{"seq", next.seq}});
        }
    }
    if (iface == InterfaceKind::Control &&
        (next.kind == EventKind::ZoomIn || next.kind == EventKind::Hover || next.kind == EventKind::CategorySelect)) {
        throw Error(ErrorCode::WrongInterface, to_string(next.kind) + " is not valid for control sessions",
                    {{"seq", next.seq}});
    }
    if (iface == InterfaceKind::Inbetween && next.kind == EventKind::SliderMove) {
        throw Error(ErrorCode::WrongInterface, "SliderMove is not valid for inbetween sessions", {{"seq", next.seq}});
    }
}

inline void validate_trace(const SessionTrace& t) {
    std::vector<SessionEvent> prior;
    prior.reserve(t.events.size());
    for (const auto& e : t.events) {
        check_next_event(t.interfaceKind, prior, e);
        prior.push_back(e);
    }
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

struct ReplayResult {
    InterfaceKind interfaceKind = InterfaceKind::Inbetween;
    /// Final catalog state (inbetween); empty at the opening screen.
    std::optional<DisplayState> state;
    /// Fine-tune target, else center (inbetween); slider position (control).
    std::optional<DesignCoords> finalCoords;
    std::optional<DesignCoords> downloaded;

    bool operator==(const ReplayResult&) const = default;
};

inline std::optional<DesignCoords> current_coords(const std::optional<DisplayState>& s) {
    if (!s) {
        return std::nullopt;
    }
    return s->fineTuneTarget ? *s->fineTuneTarget : s->center().coords;
}

/// Applies one inbetween event to the catalog state.
inline void apply_inbetween_event(const DesignSpace& space, std::optional<DisplayState>& state,
                                  std::optional<DesignCoords>& downloaded, const SessionEvent& e) {
    auto need_state = [&]() -> DisplayState& {
        if (!state) {
            throw Error(ErrorCode::IllegalEvent, to_string(e.kind) + " before a category was selected",
                        {{"seq", e.seq}});
        }
        return *state;
    };
    try {
        switch (e.kind) {
        case EventKind::SessionStart:
        case EventKind::TextEdit:
            break;
        case EventKind::CategorySelect: {
            if (state) {
                throw Error(ErrorCode::IllegalEvent, "category already selected; Reset first", {{"seq", e.seq}});
            }
            const auto corner = as_corner(e.coords());
            if (!corner) {
                throw Error(ErrorCode::UnknownCategory, "category coords are not a cube corner");
            }
            state = select_category(space, *corner);
            break;
        }
        case EventKind::Hover:
            (void)hover_preview(need_state(), e.coords());
            break;
        case EventKind::ZoomIn:
            state = zoom_in(need_state(), e.coords());
            break;
        case EventKind::Click:
            state = click(need_state(), e.coords());
            break;
        case EventKind::FineTune: {
            auto& s = need_state();
            if (!s.fineTuneTarget) {
                throw Error(ErrorCode::NoFineTuneTarget, "FineTune without a clicked instance");
            }
            state = fine_tune(s, *s.fineTuneTarget, e.axis_value().axis, e.axis_value().value).state;
            break;
        }
        case EventKind::DisplayToggle:
            switch (std::get<ToggleId>(e.payload)) {
            case ToggleId::Contrast:
                break;
            case ToggleId::ShowAll:
                state = show_all(need_state());
                break;
            case ToggleId::StartCorner:
                state = toggle_start(need_state());
                break;
            }
            break;
        case EventKind::Download: {
            const auto expected = current_coords(state);
            if (!expected || *expected != e.coords()) {
                throw Error(ErrorCode::IllegalEvent, "download coords differ from the selected instance",
                            {{"seq", e.seq}});
            }
            downloaded = e.coords();
            break;
        }
        case EventKind::Reset:
            state.reset();
            break;
        case EventKind::SliderMove:
            throw Error(ErrorCode::WrongInterface, "SliderMove in an inbetween session");
        }
    } catch (const Error& err) {
        if (err.code() == ErrorCode::IllegalEvent) {
            throw;
        }
        throw Error(ErrorCode::IllegalEvent, "event " + std::to_string(e.seq) + " (" + to_string(e.kind) +
                                                 ") is illegal: " + err.what(),
                    {{"seq", e.seq}, {"cause", std::string(code_name(err.code()))}});
    }
}

/// Control interface: sliders start at minimal values.
inline void apply_control_event(DesignCoords& sliders, std::optional<DesignCoords>& downloaded,
                                const SessionEvent& e) {
    switch (e.kind) {
    case EventKind::SliderMove: {
        const auto& av = e.axis_value();
        if (av.axis < 0 || av.axis > 2 || !(av.value >= 0.0 && av.value <= 1.0)) {
            throw Error(ErrorCode::IllegalEvent, "slider move out of range", {{"seq", e.seq}});
        }
        sliders = sliders.with(static_cast<std::size_t>(av.axis), av.value);
        break;
    }
    case EventKind::Download:
        if (e.coords() != sliders) {
            throw Error(ErrorCode::IllegalEvent, "download coords differ from the slider position", {{"seq", e.seq}});
        }
        downloaded = e.coords();
        break;
    case EventKind::Reset:
        sliders = DesignCoords{};
        break;
    case EventKind::SessionStart:
    case EventKind::TextEdit:
    case EventKind::DisplayToggle:
    case EventKind::Click:
    case EventKind::FineTune:
        break;
    default:
        throw Error(ErrorCode::WrongInterface, to_string(e.kind) + " in a control session", {{"seq", e.seq}});
    }
}

inline ReplayResult replay(const DesignSpace& space, const SessionTrace& trace) {
    if (trace.spaceHash != space.spaceHash) {
        throw Error(ErrorCode::HashMismatch, "trace was recorded against a different space",
                    {{"trace", trace.spaceHash}, {"space", space.spaceHash}});
    }
    validate_trace(trace);
    ReplayResult r;
    r.interfaceKind = trace.interfaceKind;
    if (trace.interfaceKind == InterfaceKind::Inbetween) {
        for (const auto& e : trace.events) {
            apply_inbetween_event(space, r.state, r.downloaded, e);
        }
        r.finalCoords = current_coords(r.state);
    } else {
        DesignCoords sliders;
        for (const auto& e : trace.events) {
            apply_control_event(sliders, r.downloaded, e);
        }
        r.finalCoords = sliders;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Append-only file store
// ---------------------------------------------------------------------------

struct AppendAck {
    std::int64_t seq = 0;
    bool appended = false;  // false when the event was a duplicate
};

inline bool valid_session_id(const std::string& id) {
    if (id.empty() || id.size() > 128) {
        return false;
    }
    return std::all_of(id.begin(), id.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.';
    }) && id.front() != '.';
}

/// Directory layout:
///   index.ndjson           {"file":..., "sessionId":...} per line
///   sessions/<id>.ndjson   header record, event records, optional close record
/// Records are only ever appended.
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_ / "sessions", ec);
        if (ec) {
            throw Error(ErrorCode::Io, "cannot create data directory '" + dir_.string() + "': " + ec.message());
        }
        load_index();
    }

    SessionStore(const SessionStore&) = delete;
    SessionStore& operator=(const SessionStore&) = delete;

    const std::filesystem::path& directory() const { return dir_; }

    /// Creates a session from the header fields of `header` (events ignored).
    /// Re-creating with an identical header is a no-op.
    void create_session(const SessionTrace& header) {
        if (!valid_session_id(header.sessionId)) {
            throw Error(ErrorCode::MalformedDocument, "invalid session id '" + header.sessionId + "'");
        }
        std::lock_guard lock(indexMutex_);
        if (auto it = index_.find(header.sessionId); it != index_.end()) {
            Slot& slot = *it->second;
            std::lock_guard slock(slot.mutex);
            ensure_loaded(slot, header.sessionId);
            SessionTrace existing = slot.trace;
            existing.events.clear();
            SessionTrace incoming = header;
            incoming.events.clear();
            if (existing == incoming) {
                return;
            }
            throw Error(ErrorCode::SessionExists, "session '" + header.sessionId + "' already exists");
        }
        const std::string rel = "sessions/" + header.sessionId + ".ndjson";
        append_line(dir_ / rel, with_type(header_to_json(header), "header").dump());
        append_line(dir_ / "index.ndjson", nlohmann::json{{"sessionId", header.sessionId}, {"file", rel}}.dump());
        auto slot = std::make_unique<Slot>();
        slot->file = rel;
        slot->loaded = true;
        slot->trace = header;
        slot->trace.events.clear();
        index_.emplace(header.sessionId, std::move(slot));
    }

    AppendAck append_event(const std::string& sessionId, const SessionEvent& event) {
        Slot& slot = slot_for(sessionId);
        std::lock_guard lock(slot.mutex);
        ensure_loaded(slot, sessionId);
        auto& events = slot.trace.events;
        const std::int64_t last = events.empty() ? 0 : events.back().seq;
        if (event.seq <= last) {
            auto it = std::find_if(events.begin(), events.end(), [&](const auto& e) { return e.seq == event.seq; });
            if (it != events.end() && *it == event) {
                return {event.seq, false};
            }
            throw Error(ErrorCode::SequenceGap, "sequence regression", {{"seq", event.seq}, {"last", last}});
        }
        if (slot.closed) {
            throw Error(ErrorCode::ClosedSession, "session '" + sessionId + "' is closed");
        }
        if (event.seq != last + 1) {
            throw Error(ErrorCode::SequenceGap, "sequence gap", {{"seq", event.seq}, {"expected", last + 1}});
        }
        check_next_event(slot.trace.interfaceKind, events, event);
        append_line(dir_ / slot.file, with_type(to_json(event), "event").dump());
        events.push_back(event);
        return {event.seq, true};
    }

    void close_session(const std::string& sessionId) {
        Slot& slot = slot_for(sessionId);
        std::lock_guard lock(slot.mutex);
        ensure_loaded(slot, sessionId);
        if (slot.closed) {
            return;
        }
        append_line(dir_ / slot.file, nlohmann::json{{"type", "close"}}.dump());
        slot.closed = true;
    }

    bool is_closed(const std::string& sessionId) {
        Slot& slot = slot_for(sessionId);
        std::lock_guard lock(slot.mutex);
        ensure_loaded(slot, sessionId);
        return slot.closed;
    }

    /// Reads the session file from disk.
    SessionTrace load_trace(const std::string& sessionId) {
        Slot& slot = slot_for(sessionId);
        std::lock_guard lock(slot.mutex);
        bool closed = false;
        return read_session_file(dir_ / slot.file, closed);
    }

    std::vector<std::string> session_ids() const {
        std::lock_guard lock(indexMutex_);
        std::vector<std::string> ids;
        for (const auto& [id, slot] : index_) {
            ids.push_back(id);
        }
        return ids;
    }

    /// Writes a complete trace (header then events) through the append path.
    void write_trace(const SessionTrace& t) {
        create_session(t);
        for (const auto& e : t.events) {
            append_event(t.sessionId, e);
        }
    }

    static SessionTrace read_session_file(const std::filesystem::path& path, bool& closed) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw Error(ErrorCode::Io, "cannot open session file '" + path.string() + "'");
        }
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string text = ss.str();
        SessionTrace trace;
        std::size_t pos = 0;
        std::size_t lineNo = 0;
        bool haveHeader = false;
        closed = false;
        while (pos < text.size()) {
            ++lineNo;
            const auto nl = text.find('\n', pos);
            auto corrupt = [&](const std::string& why) {
                return Error(ErrorCode::CorruptRecord,
                             "corrupt record at line " + std::to_string(lineNo) + " of " + path.string() + ": " + why,
                             {{"line", lineNo}, {"file", path.string()}});
            };
            if (nl == std::string::npos) {
                throw corrupt("truncated record");
            }
            const std::string line = text.substr(pos, nl - pos);
            pos = nl + 1;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error&) {
                throw corrupt("not valid JSON");
            }
            try {
                const auto type = j.at("type").get<std::string>();
                if (type == "header") {
                    if (haveHeader) {
                        throw corrupt("duplicate header");
                    }
                    trace = header_from_json(j);
                    haveHeader = true;
                } else if (type == "event") {
                    if (!haveHeader) {
                        throw corrupt("event before header");
                    }
                    trace.events.push_back(event_from_json(j));
                } else if (type == "close") {
                    closed = true;
                } else {
                    throw corrupt("unknown record type");
                }
            } catch (const nlohmann::json::exception&) {
                throw corrupt("missing record type");
            } catch (const Error& e) {
                if (e.code() == ErrorCode::CorruptRecord) {
                    throw;
                }
                throw corrupt(e.what());
            }
        }
        if (!haveHeader) {
            throw Error(ErrorCode::CorruptRecord, "session file has no header", {{"line", 0}, {"file", path.string()}});
        }
        return trace;
    }

private:
    struct Slot {
        std::mutex mutex;
        std::string file;
        bool loaded = false;
        bool closed = false;
        SessionTrace trace;
    };

    static nlohmann::json with_type(nlohmann::json j, const char* type) {
        j["type"] = type;
        return j;
    }

    static void append_line(const std::filesystem::path& path, const std::string& line) {
        const std::string data = line + "\n";
        const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
        if (fd < 0) {
            throw Error(ErrorCode::Io, "cannot open '" + path.string() + "': " + std::strerror(errno));
        }
        std::size_t done = 0;
        while (done < data.size()) {
            const auto n = ::write(fd, data.data() + done, data.size() - done);
            if (n < 0) {
                if (errno == EINTR) {
                    continue;
                }
                const std::string why = std::strerror(errno);
                ::close(fd);
                throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed: " + why);
            }
            done += static_cast<std::size_t>(n);
        }
        ::fsync(fd);
        ::close(fd);
    }

    void load_index() {
        std::ifstream in(dir_ / "index.ndjson");
        if (!in) {
            return;
        }
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) {
                continue;
            }
            try {
                const auto j = nlohmann::json::parse(line);
                auto slot = std::make_unique<Slot>();
                slot->file = j.at("file").get<std::string>();
                index_.emplace(j.at("sessionId").get<std::string>(), std::move(slot));
            } catch (const nlohmann::json::exception&) {
                // A torn trailing index line belongs to a session whose header may
                // exist; the session is simply not indexed.
            }
        }
    }

    Slot& slot_for(const std::string& sessionId) {
        std::lock_guard lock(indexMutex_);
        auto it = index_.find(sessionId);
        if (it == index_.end()) {
            throw Error(ErrorCode::UnknownSession, "unknown session '" + sessionId + "'", {{"sessionId", sessionId}});
        }
        return *it->second;
    }

    void ensure_loaded(Slot& slot, const std::string&) {
        if (slot.loaded) {
            return;
        }
        slot.trace = read_session_file(dir_ / slot.file, slot.closed);
        slot.loaded = true;
    }

    std::filesystem::path dir_;
    mutable std::mutex indexMutex_;
    std::map<std::string, std::unique_ptr<Slot>> index_;
};

} // namespace inbetween
