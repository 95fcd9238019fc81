#include "support.hpp"

#include "inbetween/service_http.hpp"

#include <gtest/gtest.h>

#include <set>
#include <thread>

using namespace inbetween;
using nlohmann::json;
using testing_support::demo_space;
using testing_support::TempDir;
using testing_support::TraceScript;

namespace {

/// Category, hover, two zooms, click, fine-tune, download.
SessionTrace workflow_trace(const std::string& sessionId = "fig3") {
    return TraceScript(InterfaceKind::Inbetween, sessionId)
        .add(EventKind::CategorySelect, DesignCoords(0, 0, 0))
        .add(EventKind::Hover, DesignCoords(1, 0, 0), 900)
        .add(EventKind::ZoomIn, DesignCoords(0, 0, 0))
        .add(EventKind::ZoomIn, DesignCoords(0.5, 0, 0))
        .add(EventKind::Click, DesignCoords(0.5, 0.25, 0))
        .add(EventKind::FineTune, AxisValue{2, 0.1})
        .add(EventKind::Download, DesignCoords(0.5, 0.25, 0.1))
        .trace();
}

json header_body(const SessionTrace& t) {
    auto h = header_to_json(t);
    h.erase("v");
    return h;
}

json events_body(const SessionTrace& t, std::size_t from, std::size_t to) {
    json events = json::array();
    for (std::size_t i = from; i < to && i < t.events.size(); ++i) {
        events.push_back(to_json(t.events[i]));
    }
    return {{"events", events}};
}

class ApiTest : public ::testing::Test {
protected:
    TempDir dir{"api"};
    Api api{demo_space(), dir.path()};

    ApiResponse get(const std::string& path, const Api::Query& q = {}) { return api.handle("GET", path, q); }
    ApiResponse post(const std::string& path, const json& body) { return api.handle("POST", path, {}, body.dump()); }

    void upload(const SessionTrace& t) {
        ASSERT_EQ(post("/api/session", header_body(t)).status, 201);
        const auto r = post("/api/session/" + t.sessionId + "/events", events_body(t, 0, t.events.size()));
        ASSERT_EQ(r.status, 200) << r.body;
    }
};

void expect_error(const ApiResponse& r, ErrorCode code) {
    EXPECT_EQ(r.status, http_status(code)) << r.body;
    const auto j = r.json();
    EXPECT_EQ(j.at("v"), kApiVersion);
    EXPECT_EQ(j.at("error").at("code"), code_name(code)) << r.body;
    EXPECT_TRUE(j.at("error").at("message").is_string());
}

} // namespace

TEST(ApiErrors, EveryCodeHasOneStableNameAndStatus) {
    std::set<std::string> names;
    for (auto code : kAllErrorCodes) {
        EXPECT_TRUE(names.insert(std::string(code_name(code))).second) << code_name(code);
        const int s = http_status(code);
        EXPECT_TRUE(s == 400 || s == 404 || s == 409 || s == 500);
        EXPECT_EQ(s == 500, exit_code(code) == 1);
        EXPECT_TRUE(exit_code(code) == 1 || exit_code(code) == 2);
    }
    EXPECT_EQ(names.size(), std::size(kAllErrorCodes));
}

TEST_F(ApiTest, SpaceEchoesTheLoadedSpace) {
    const auto r = get("/api/space");
    ASSERT_EQ(r.status, 200);
    const auto j = r.json();
    EXPECT_EQ(j.at("v"), kApiVersion);
    EXPECT_EQ(j.at("spaceHash"), demo_space().spaceHash);
    ASSERT_EQ(j.at("axes").size(), 3u);
    EXPECT_EQ(j.at("axes")[0].at("name"), demo_space().axes[0].name);
    EXPECT_EQ(j.at("axes")[2].at("high"), demo_space().axes[2].wordHigh);
    ASSERT_EQ(j.at("categories").size(), 2u);
    EXPECT_EQ(j.at("categories")[0].at("corner"), demo_space().startCorners[0].corner);
    EXPECT_EQ(j.at("glyphs").size(), demo_space().glyphs.size());
}

TEST_F(ApiTest, InstanceAtCornersIsTheMaster) {
    for (int b = 0; b < 8; ++b) {
        const auto c = corner_coords(static_cast<CornerMask>(b));
        const auto r = get("/api/instance", {{"glyph", "o"},
                                              {"x", std::to_string(c[0])},
                                              {"y", std::to_string(c[1])},
                                              {"z", std::to_string(c[2])}});
        ASSERT_EQ(r.status, 200) << r.body;
        const auto j = r.json();
        EXPECT_EQ(j.at("outline"), outline_to_json(masters_of(demo_space(), "o")[b])) << b;
        EXPECT_TRUE(testing_support::well_formed_xml(j.at("svg").get<std::string>()));
    }
}

TEST_F(ApiTest, InstanceErrors) {
    expect_error(get("/api/instance", {{"glyph", "aleph"}, {"x", "0"}, {"y", "0"}, {"z", "0"}}),
                 ErrorCode::UnknownGlyph);
    expect_error(get("/api/instance", {{"glyph", "o"}, {"x", "1.5"}, {"y", "0"}, {"z", "0"}}),
                 ErrorCode::InvalidCoords);
    expect_error(get("/api/instance", {{"glyph", "o"}, {"x", "abc"}, {"y", "0"}, {"z", "0"}}),
                 ErrorCode::InvalidCoords);
    expect_error(get("/api/instance", {{"x", "0"}, {"y", "0"}, {"z", "0"}}), ErrorCode::MalformedDocument);
    expect_error(get("/api/nothing"), ErrorCode::UnknownRoute);
    expect_error(api.handle("DELETE", "/api/space"), ErrorCode::UnknownRoute);
}

TEST_F(ApiTest, TextReportsWarnings) {
    const auto r = get("/api/text", {{"x", "0.5"}, {"y", "0.5"}, {"z", "0.5"}, {"text", "noq"}, {"size", "50"}});
    ASSERT_EQ(r.status, 200);
    const auto j = r.json();
    EXPECT_EQ(j.at("warnings").size(), 1u);
    EXPECT_EQ(j.at("lineWidths").size(), 1u);
    EXPECT_TRUE(testing_support::well_formed_xml(j.at("svg").get<std::string>()));
}

TEST_F(ApiTest, NeighborsDelegateToTheEngine) {
    const auto r = get("/api/neighbors", {{"x", "0"}, {"y", "0"}, {"z", "0"}, {"level", "1"}});
    ASSERT_EQ(r.status, 200);
    json expected = json::array();
    for (const auto& n : neighbors_at_level({0, 0, 0}, 1)) {
        expected.push_back({n[0], n[1], n[2]});
    }
    EXPECT_EQ(r.json().at("neighbors"), expected);
    expect_error(get("/api/neighbors", {{"x", "0"}, {"y", "0"}, {"z", "0"}, {"level", "4"}}),
                 ErrorCode::ValueOutOfRange);
}

TEST_F(ApiTest, DownloadIsAReloadableInstanceDocument) {
    const auto r = get("/api/download", {{"x", "0.25"}, {"y", "0.5"}, {"z", "1"}});
    ASSERT_EQ(r.status, 200);
    const auto doc = r.json();
    const auto reloaded = load_space(doc);
    const DesignCoords c(0.25, 0.5, 1.0);
    for (const auto& [name, masters] : reloaded.glyphs) {
        const auto expected = interpolate_glyph(demo_space(), name, c);
        for (const auto& m : masters) {
            EXPECT_EQ(outline_to_json(m), outline_to_json(expected)) << name;
        }
        // Eight equal masters reproduce the instance anywhere, up to rounding of the weights.
        std::mt19937_64 rng(1);
        const auto anywhere = interpolate_glyph(reloaded, name, testing_support::random_coords(rng));
        EXPECT_NEAR(anywhere.advanceWidth, expected.advanceWidth, 1e-9);
        for (std::size_t ci = 0; ci < expected.contours.size(); ++ci) {
            for (std::size_t n = 0; n < expected.contours[ci].nodes.size(); ++n) {
                EXPECT_NEAR(anywhere.contours[ci].nodes[n].x, expected.contours[ci].nodes[n].x, 1e-9);
                EXPECT_NEAR(anywhere.contours[ci].nodes[n].y, expected.contours[ci].nodes[n].y, 1e-9);
            }
        }
    }
    EXPECT_EQ(doc.at("instance").at("coords"), json({0.25, 0.5, 1.0}));
    EXPECT_EQ(doc.at("instance").at("sourceSpaceHash"), demo_space().spaceHash);
    const auto words = descriptor_words(demo_space(), c);
    EXPECT_EQ(doc.at("instance").at("descriptor"), json({words[0], words[1], words[2]}));

    const auto svgr = get("/api/download", {{"x", "0.25"}, {"y", "0.5"}, {"z", "1"}, {"format", "svg"}});
    EXPECT_EQ(svgr.contentType, "image/svg+xml");
    EXPECT_TRUE(testing_support::well_formed_xml(svgr.body));
}

TEST_F(ApiTest, SessionLifecycle) {
    const auto t = workflow_trace();
    ASSERT_NO_THROW(replay(demo_space(), t));
    const auto created = post("/api/session", header_body(t));
    EXPECT_EQ(created.status, 201);
    EXPECT_EQ(created.json().at("sessionId"), t.sessionId);
    EXPECT_EQ(post("/api/session", header_body(t)).status, 201);
    auto other = header_body(t);
    other["userId"] = "someone else";
    expect_error(post("/api/session", other), ErrorCode::SessionExists);

    const std::string events = "/api/session/" + t.sessionId + "/events";
    auto r = post(events, events_body(t, 0, 4));
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(r.json().at("appended"), 4);
    EXPECT_EQ(r.json().at("lastSeq"), 4);

    // Overlapping resend: the first two are acknowledged duplicates.
    r = post(events, events_body(t, 2, 8));
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(r.json().at("appended"), 4);
    EXPECT_EQ(r.json().at("duplicates"), 2);
    const auto stored = get("/api/session/" + t.sessionId).json();
    r = post(events, events_body(t, 0, 8));
    EXPECT_EQ(r.json().at("appended"), 0);
    EXPECT_EQ(r.json().at("duplicates"), 8);
    EXPECT_EQ(get("/api/session/" + t.sessionId).json(), stored);
    EXPECT_EQ(canonical_text(trace_from_json(stored.at("trace"))), canonical_text(t));

    EXPECT_EQ(post("/api/session/" + t.sessionId + "/close", json::object()).status, 200);
    EXPECT_TRUE(get("/api/session/" + t.sessionId).json().at("closed"));
    const auto reset = make_event(9, 99999, EventKind::Reset);
    expect_error(post(events, json{{"events", {to_json(reset)}}}), ErrorCode::ClosedSession);
    EXPECT_EQ(post(events, events_body(t, 7, 8)).status, 200);
}

TEST_F(ApiTest, RejectedBatchesWriteNothing) {
    const auto t = workflow_trace();
    ASSERT_EQ(post("/api/session", header_body(t)).status, 201);
    const std::string events = "/api/session/" + t.sessionId + "/events";
    ASSERT_EQ(post(events, events_body(t, 0, 2)).status, 200);
    const auto before = get("/api/session/" + t.sessionId).body;

    expect_error(post(events, events_body(t, 3, 5)), ErrorCode::SequenceGap);
    auto conflicting = t.events[1];
    conflicting.tMs += 5;
    expect_error(post(events, json{{"events", {to_json(conflicting)}}}), ErrorCode::SequenceGap);
    // Valid seq but not shown at this zoom level: the batch fails replay.
    auto illegal = make_event(3, 5000, EventKind::ZoomIn, DesignCoords(0.25, 0.25, 0));
    auto next = make_event(4, 5100, EventKind::Hover, DesignCoords(0, 0, 0));
    expect_error(post(events, json{{"events", {to_json(next), to_json(illegal)}}}), ErrorCode::SequenceGap);
    expect_error(post(events, json{{"events", {to_json(illegal), to_json(next)}}}), ErrorCode::IllegalEvent);
    expect_error(post(events, json{{"events", "nope"}}), ErrorCode::MalformedDocument);
    expect_error(api.handle("POST", events, {}, "{"), ErrorCode::MalformedDocument);
    EXPECT_EQ(get("/api/session/" + t.sessionId).body, before);

    expect_error(post("/api/session/ghost/events", events_body(t, 0, 1)), ErrorCode::UnknownSession);
    expect_error(get("/api/session/ghost"), ErrorCode::UnknownSession);
    auto mismatch = header_body(t);
    mismatch["sessionId"] = "other";
    mismatch["spaceHash"] = std::string(64, 'f');
    expect_error(post("/api/session", mismatch), ErrorCode::HashMismatch);
}

TEST_F(ApiTest, SessionAnalysisMatchesClassify) {
    const auto t = workflow_trace();
    upload(t);
    const auto r = get("/api/analysis/session/" + t.sessionId);
    ASSERT_EQ(r.status, 200) << r.body;
    const auto j = r.json();
    EXPECT_EQ(j.at("patterns"), to_json(classify(t)));
    const auto labels = j.at("patterns").at("labels");
    EXPECT_NE(std::find(labels.begin(), labels.end(), "Convergent"), labels.end());
    EXPECT_EQ(std::find(labels.begin(), labels.end(), "MinimalInteraction"), labels.end());
    EXPECT_EQ(j.at("interestAreas").size(), 2u);
    EXPECT_EQ(j.at("tree").at("nodes").size(), 3u);
    EXPECT_EQ(j.at("tree").at("nodes")[2].at("parent"), 1);
    EXPECT_EQ(j.at("tree").at("traversalOrder"), json({0, 1, 2}));
}

TEST_F(ApiTest, ControlSessionsGetSweeps) {
    const auto t = make_control_trace(demo_space(), "ctl", "U1", "T1", {{0, 1}, {0, 0}, {0, 1}});
    upload(t);
    const auto j = get("/api/analysis/session/ctl").json();
    EXPECT_EQ(j.at("sweeps"), to_json(detect_extreme_sweeps(t)));
    EXPECT_FALSE(j.contains("patterns"));
}

TEST_F(ApiTest, CohortAnalysisMatchesTheLibrary) {
    const auto cohort = simulate_cohort(demo_space(), 4, 3, 5);
    for (const auto& t : cohort) {
        upload(t);
    }
    EXPECT_EQ(get("/api/analysis/cohort").json(), to_json(cohort_report(cohort)));
    std::vector<SessionTrace> t2;
    std::copy_if(cohort.begin(), cohort.end(), std::back_inserter(t2), [](const auto& t) { return t.taskId == "T2"; });
    EXPECT_EQ(get("/api/analysis/cohort", {{"task", "T2"}}).json(), to_json(cohort_report(t2)));
    const auto byUser = get("/api/analysis/cohort", {{"user", "U3"}}).json();
    EXPECT_EQ(byUser.at("perUser").size(), 1u);
    EXPECT_EQ(byUser.at("perUser").at("U3").at("traces"), 3);
}

TEST_F(ApiTest, RepeatedGetsAreIdentical) {
    upload(workflow_trace());
    const std::vector<std::pair<std::string, Api::Query>> gets = {
        {"/api/space", {}},
        {"/api/instance", {{"glyph", "n"}, {"x", "0.3"}, {"y", "0.6"}, {"z", "0.9"}}},
        {"/api/text", {{"x", "0.3"}, {"y", "0.6"}, {"z", "0.9"}, {"text", "lion\nnoon"}}},
        {"/api/download", {{"x", "0.3"}, {"y", "0.6"}, {"z", "0.9"}}},
        {"/api/session/fig3", {}},
        {"/api/analysis/session/fig3", {}},
        {"/api/analysis/cohort", {}},
    };
    for (const auto& [path, q] : gets) {
        const auto a = get(path, q);
        EXPECT_EQ(a.status, 200) << path;
        EXPECT_EQ(a.body, get(path, q).body) << path;
    }
}

TEST_F(ApiTest, ConcurrentRetriesAppendOnce) {
    const auto t = workflow_trace();
    ASSERT_EQ(post("/api/session", header_body(t)).status, 201);
    std::vector<std::thread> clients;
    for (int c = 0; c < 6; ++c) {
        clients.emplace_back([&] {
            for (std::size_t i = 1; i <= t.events.size(); ++i) {
                (void)post("/api/session/fig3/events", events_body(t, 0, i));
            }
        });
    }
    for (auto& c : clients) {
        c.join();
    }
    EXPECT_EQ(api.store().load_trace("fig3"), t);
}

TEST(HttpLoopback, WorkflowOverTheWire) {
    TempDir dir("http");
    Api api(demo_space(), dir.path());
    httplib::Server server;
    install_routes(server, api);
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread loop([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto space = client.Get("/api/space");
    ASSERT_TRUE(space);
    EXPECT_EQ(space->status, 200);
    EXPECT_EQ(json::parse(space->body).at("spaceHash"), demo_space().spaceHash);

    const auto t = workflow_trace();
    auto created = client.Post("/api/session", header_body(t).dump(), "application/json");
    ASSERT_TRUE(created);
    EXPECT_EQ(created->status, 201);
    for (std::size_t i = 0; i < t.events.size(); i += 3) {
        auto r = client.Post("/api/session/fig3/events", events_body(t, i, i + 3).dump(), "application/json");
        ASSERT_TRUE(r);
        EXPECT_EQ(r->status, 200) << r->body;
    }
    auto analysis = client.Get("/api/analysis/session/fig3");
    ASSERT_TRUE(analysis);
    EXPECT_EQ(json::parse(analysis->body).at("patterns"), to_json(classify(t)));

    auto instance = client.Get("/api/instance?glyph=o&x=0&y=0&z=0");
    ASSERT_TRUE(instance);
    EXPECT_EQ(json::parse(instance->body).at("outline"), outline_to_json(masters_of(demo_space(), "o")[0]));

    auto missing = client.Get("/api/nowhere");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    EXPECT_EQ(json::parse(missing->body).at("error").at("code"), "unknown_route");

    server.stop();
    loop.join();
}
