#pragma once

// HTTP/1.1 binding of Api over cpp-httplib.

#include "inbetween/service.hpp"

#include <httplib.h>

#include <string>

namespace inbetween {

struct ServeConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path dataDir = "data/sessions";
    std::string spacePath;
    std::filesystem::path staticDir;  // optional UI assets
};

/// Installs /api/* handlers on `server`. Static assets are mounted at / when
/// `staticDir` exists.
inline void install_routes(httplib::Server& server, Api& api, const std::filesystem::path& staticDir = {}) {
    auto forward = [&api](const httplib::Request& req, httplib::Response& res) {
        Api::Query q;
        for (const auto& [k, v] : req.params) {
            q.emplace(k, v);
        }
        const auto r = api.handle(req.method, req.path, q, req.body);
        res.status = r.status;
        res.set_content(r.body, r.contentType);
    };
    server.Get(R"(/api/.*)", forward);
    server.Post(R"(/api/.*)", forward);
    if (!staticDir.empty() && std::filesystem::is_directory(staticDir)) {
        server.set_mount_point("/", staticDir.string());
    }
}

} // namespace inbetween
