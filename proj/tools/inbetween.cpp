// inbetween: render, analyze, audit, simulate and serve.

#include "inbetween/inbetween.hpp"
#include "inbetween/service_http.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

namespace {

using namespace inbetween;

DesignSpace load_or_demo(const std::string& path) { return path.empty() ? demo::make_demo_space() : load_space_file(path); }

DesignCoords parse_coords(const std::string& text) {
    std::array<double, 3> c{};
    std::stringstream ss(text);
    std::string part;
    int n = 0;
    while (std::getline(ss, part, ',')) {
        if (n >= 3) {
            n = 4;
            break;
        }
        char* end = nullptr;
        c[n] = std::strtod(part.c_str(), &end);
        if (part.empty() || *end != '\0') {
            throw Error(ErrorCode::InvalidCoords, "coordinates must be three numbers: x,y,z", {{"coords", text}});
        }
        ++n;
    }
    if (n != 3) {
        throw Error(ErrorCode::InvalidCoords, "coordinates must be three numbers: x,y,z", {{"coords", text}});
    }
    for (double v : c) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorCode::InvalidCoords, "coordinates must lie in [0,1]", {{"coords", text}});
        }
    }
    return DesignCoords(c[0], c[1], c[2]);
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) {
        throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (!part.empty()) {
            out.push_back(part);
        }
    }
    return out;
}

std::vector<SessionTrace> load_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error(ErrorCode::Io, "data directory '" + dir.string() + "' does not exist");
    }
    SessionStore store(dir);
    std::vector<SessionTrace> traces;
    for (const auto& id : store.session_ids()) {
        traces.push_back(store.load_trace(id));
    }
    return traces;
}

int run_serve(const ServeConfig& cfg) {
    Api api(load_or_demo(cfg.spacePath), cfg.dataDir);
    httplib::Server server;
    install_routes(server, api, cfg.staticDir);

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });

    if (!server.bind_to_port(cfg.host, cfg.port)) {
        std::cerr << "cannot bind " << cfg.host << ":" << cfg.port << "\n";
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
        return 1;
    }
    std::cerr << "inbetween serving " << api.space().spaceHash.substr(0, 12) << " on http://" << cfg.host << ":"
              << cfg.port << " (data: " << cfg.dataDir.string() << ")\n";
    server.listen_after_bind();
    if (waiter.joinable()) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inbetween: design-space catalog, session analytics and SVG rendering"};
    app.require_subcommand(1);

    std::string spacePath;
    auto add_space = [&](CLI::App* sub) {
        sub->add_option("--space", spacePath, "Design-space document (default: built-in demo space)");
    };

    auto* render = app.add_subcommand("render", "Render an instance glyph, example text or a specimen sheet");
    std::string coordsText = "0.5,0.5,0.5";
    std::string glyph;
    std::string text;
    std::string specimen;
    double step = 0.5;
    double sizePx = 200.0;
    double letterSpacing = 0.0;
    double lineSpacing = -1.0;
    std::string out;
    add_space(render);
    render->add_option("--coords", coordsText, "Instance coordinates x,y,z in [0,1]");
    auto* modes = render->add_option_group("mode");
    modes->add_option("--glyph", glyph, "Glyph name");
    modes->add_option("--text", text, "Example text");
    modes->add_option("--specimen", specimen, "Comma-separated glyph names for a specimen sheet");
    modes->require_option(1);
    render->add_option("--step", step, "Specimen lattice step (1, 0.5 or 0.25)");
    render->add_option("--size", sizePx, "Em size in px");
    render->add_option("--letter-spacing", letterSpacing, "Extra px between glyphs");
    render->add_option("--line-spacing", lineSpacing, "Baseline distance in px (default 1.2 x size)");
    render->add_option("--out", out, "Output file (default: stdout)");

    auto* analyze = app.add_subcommand("analyze", "Analyze stored sessions: report JSON and overlay grid SVG");
    std::string dataDir = "data/sessions";
    std::string reportOut = "report.json";
    std::string overlayOut = "overlay.svg";
    analyze->add_option("--data", dataDir, "Session data directory")->required();
    analyze->add_option("--report", reportOut, "Report output file");
    analyze->add_option("--overlay", overlayOut, "Overlay grid output file");

    auto* audit = app.add_subcommand("audit", "Check a scripted flow against the catalog guidelines");
    std::string flow = "demo";
    add_space(audit);
    audit->add_option("--flow", flow, "Scripted flow")->check(CLI::IsMember({"demo", "mutated"}));

    auto* simulate = app.add_subcommand("simulate", "Write a synthetic cohort of session traces");
    std::uint64_t seed = 7;
    int users = 21;
    int tasks = 6;
    std::string simOut = "data/sessions";
    add_space(simulate);
    simulate->add_option("--seed", seed, "Generator seed");
    simulate->add_option("--users", users, "Number of users")->check(CLI::PositiveNumber);
    simulate->add_option("--tasks", tasks, "Number of tasks")->check(CLI::PositiveNumber);
    simulate->add_option("--out", simOut, "Session data directory");

    auto* serve = app.add_subcommand("serve", "Run the HTTP JSON API");
    ServeConfig serveCfg;
    if (const char* env = std::getenv("INBETWEEN_PORT")) {
        serveCfg.port = std::atoi(env);
    }
    if (const char* env = std::getenv("INBETWEEN_DATA_DIR")) {
        serveCfg.dataDir = env;
    }
    std::string serveData;
    std::string staticDir;
    add_space(serve);
    serve->add_option("--host", serveCfg.host, "Bind address");
    serve->add_option("--port", serveCfg.port, "Port (env INBETWEEN_PORT)");
    serve->add_option("--data", serveData, "Session data directory (env INBETWEEN_DATA_DIR)");
    serve->add_option("--static", staticDir, "UI asset directory served at /");

    auto* demoSpace = app.add_subcommand("demo-space", "Write the built-in demo design space document");
    std::string demoOut;
    demoSpace->add_option("--out", demoOut, "Output file (default: stdout)");

    auto* validate = app.add_subcommand("validate", "Load and validate a design-space document");
    std::string validatePath;
    validate->add_option("space", validatePath, "Design-space document")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*render) {
            const auto space = load_or_demo(spacePath);
            const auto coords = parse_coords(coordsText);
            if (!glyph.empty()) {
                write_output(out, svg::glyph_svg(interpolate_glyph(space, glyph, coords), sizePx));
            } else if (!text.empty()) {
                const auto layout = svg::text_svg(space, coords, text, sizePx, letterSpacing,
                                                  lineSpacing < 0 ? sizePx * 1.2 : lineSpacing);
                for (const auto& w : layout.warnings) {
                    std::cerr << "warning: " << w << "\n";
                }
                write_output(out, layout.svg);
            } else {
                write_output(out, svg::specimen_sheet(space, split_list(specimen), step));
            }
        } else if (*analyze) {
            const auto traces = load_corpus(dataDir);
            write_output(reportOut, to_json(cohort_report(traces)).dump(2) + "\n");
            write_output(overlayOut, svg::overlay_grid(traces));
            std::cerr << "analyzed " << traces.size() << " sessions\n";
        } else if (*audit) {
            const auto space = load_or_demo(spacePath);
            auto f = demo_flow(space);
            if (flow == "mutated") {
                f.opening.selectedIndex = 0;
            }
            const auto report = audit_guidelines(f);
            for (const auto& c : report.checks) {
                std::cout << (c.pass ? "PASS " : "FAIL ") << c.ruleId << "  " << c.detail << "\n";
            }
            return report.all_pass() ? 0 : 2;
        } else if (*simulate) {
            const auto space = load_or_demo(spacePath);
            SessionStore store(simOut);
            const auto traces = simulate_cohort(space, users, tasks, seed);
            for (const auto& t : traces) {
                store.write_trace(t);
                store.close_session(t.sessionId);
            }
            std::cerr << "wrote " << traces.size() << " sessions to " << simOut << "\n";
        } else if (*serve) {
            serveCfg.spacePath = spacePath;
            if (!serveData.empty()) {
                serveCfg.dataDir = serveData;
            }
            serveCfg.staticDir = staticDir;
            return run_serve(serveCfg);
        } else if (*demoSpace) {
            write_output(demoOut, to_document(demo::make_demo_space()).dump(1) + "\n");
        } else if (*validate) {
            const auto space = load_space_file(validatePath);
            std::cout << "ok " << space.glyphs.size() << " glyphs, spaceHash " << space.spaceHash << "\n";
        }
    } catch (const Error& e) {
        std::cerr << error_document(e).dump(2) << "\n";
        return exit_code(e.code());
    }
    return 0;
}
