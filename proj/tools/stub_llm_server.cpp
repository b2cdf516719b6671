// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic completion endpoint for tests and offline runs. Speaks the
// neutral envelope: POST {"model","system","user"} -> {"text"}.
//
// Modes:
//   echo    reply with the user text verbatim
//   canned  reply from a JSON map keyed by the fnv1a64 hex of the user text
//           (a "default" key catches everything else)
//   script  reply with the entries of a JSON array, one per request, in order

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <mutex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "prego/hash.hpp"
#include "prego/io_util.hpp"
#include "prego/llm_client.hpp"

namespace {

std::string hash_key(const std::string& user) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, prego::fnv1a64(user));
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic completion stub for the prego pipeline"};

    std::string mode = "echo";
    std::string replies_path;
    std::string path = "/complete";
    std::string host = "127.0.0.1";
    int port = 0;
    int fail_first = 0;
    std::string hash_of;

    app.add_option("--mode", mode, "echo|canned|script")
        ->check(CLI::IsMember({"echo", "canned", "script"}));
    app.add_option("--replies", replies_path, "JSON reply map (canned) or array (script)");
    app.add_option("--path", path, "endpoint path (default /complete)");
    app.add_option("--host", host, "bind address");
    app.add_option("--port", port, "port, 0 picks a free one");
    app.add_option("--fail-first", fail_first, "return HTTP 500 for the first N requests");
    app.add_option("--hash", hash_of, "print the canned-reply key for this text and exit");

    CLI11_PARSE(app, argc, argv);

    if (!hash_of.empty()) {
        std::printf("%s\n", hash_key(hash_of).c_str());
        return 0;
    }

    nlohmann::json replies;
    if (mode != "echo") {
        if (replies_path.empty()) {
            std::fprintf(stderr, "--replies is required for mode %s\n", mode.c_str());
            return 2;
        }
        try {
            replies = nlohmann::json::parse(prego::read_file(replies_path));
        } catch (const std::exception& e) {
            std::fprintf(stderr, "cannot load replies: %s\n", e.what());
            return 2;
        }
    }

    httplib::Server server;
    std::atomic<int> request_no{0};
    std::mutex script_mu;
    std::size_t script_pos = 0;

    server.Post(path, [&](const httplib::Request& req, httplib::Response& res) {
        const int n = request_no++;
        if (n < fail_first) {
            res.status = 500;
            res.set_content("scripted failure", "text/plain");
            return;
        }

        prego::CompletionRequest parsed;
        try {
            parsed = prego::parse_completion_request(req.body);
        } catch (const prego::ProtocolError& e) {
            res.status = 400;
            res.set_content(e.what(), "text/plain");
            return;
        }

        std::string text;
        if (mode == "echo") {
            text = parsed.user;
        } else if (mode == "canned") {
            const std::string key = hash_key(parsed.user);
            if (replies.contains(key)) {
                text = replies[key].get<std::string>();
            } else if (replies.contains("default")) {
                text = replies["default"].get<std::string>();
            } else {
                res.status = 404;
                res.set_content("no canned reply for key " + key, "text/plain");
                return;
            }
        } else {  // script
            std::lock_guard<std::mutex> lock(script_mu);
            if (script_pos >= replies.size()) {
                res.status = 500;
                res.set_content("script exhausted", "text/plain");
                return;
            }
            text = replies[script_pos++].get<std::string>();
        }
        res.set_content(prego::encode_completion_response(text), "application/json");
    });

    if (port == 0) {
        port = server.bind_to_any_port(host);
        if (port < 0) {
            std::fprintf(stderr, "cannot bind to %s\n", host.c_str());
            return 1;
        }
    } else if (!server.bind_to_port(host, port)) {
        std::fprintf(stderr, "cannot bind to %s:%d\n", host.c_str(), port);
        return 1;
    }

    std::printf("listening on %d\n", port);
    std::fflush(stdout);
    return server.listen_after_bind() ? 0 : 1;
}
