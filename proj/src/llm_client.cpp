// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#include "prego/llm_client.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace prego {

namespace {

using json = nlohmann::ordered_json;

std::optional<std::string> env_string(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

}  // namespace

ClientConfig apply_env_overrides(ClientConfig cfg) {
    if (auto v = env_string("PREGO_LLM_ENDPOINT")) cfg.endpoint_url = *v;
    if (auto v = env_string("PREGO_LLM_MODEL")) cfg.model_name = *v;
    if (auto v = env_string("PREGO_LLM_API_KEY")) cfg.api_key = *v;
    if (auto v = env_string("PREGO_LLM_TIMEOUT_MS")) {
        try {
            cfg.timeout = std::chrono::milliseconds(std::stol(*v));
        } catch (const std::exception&) {
            throw InvalidInputError("PREGO_LLM_TIMEOUT_MS must be an integer, got '" + *v + "'");
        }
    }
    return cfg;
}

std::string encode_completion_request(const CompletionRequest& req) {
    json body;
    body["model"] = req.model;
    body["system"] = req.system;
    body["user"] = req.user;
    return body.dump();
}

CompletionRequest parse_completion_request(const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("request body is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("model") || !doc.contains("system") ||
        !doc.contains("user") || !doc["model"].is_string() || !doc["system"].is_string() ||
        !doc["user"].is_string()) {
        throw ProtocolError("request body must be {\"model\", \"system\", \"user\"} strings");
    }
    return {doc["model"].get<std::string>(), doc["system"].get<std::string>(),
            doc["user"].get<std::string>()};
}

std::string encode_completion_response(const std::string& text) {
    json body;
    body["text"] = text;
    return body.dump();
}

std::string parse_completion_response(const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("response body is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("text") || !doc["text"].is_string()) {
        throw ProtocolError("response body must be {\"text\": string}");
    }
    return doc["text"].get<std::string>();
}

std::vector<std::chrono::milliseconds> backoff_schedule(const ClientConfig& cfg) {
    std::vector<std::chrono::milliseconds> delays;
    delays.reserve(static_cast<std::size_t>(std::max(0, cfg.max_retries)));
    for (int i = 0; i < cfg.max_retries; ++i) {
        delays.push_back(cfg.backoff_base * (1LL << i));
    }
    return delays;
}

namespace {

// Simple counting limiter; std::counting_semaphore needs a compile-time cap.
class InFlightLimiter {
public:
    explicit InFlightLimiter(int capacity) : capacity_(std::max(1, capacity)) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [this] { return in_flight_ < capacity_; });
        ++in_flight_;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lock(mu_);
            --in_flight_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int capacity_;
    int in_flight_{0};
};

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // leading slash
};

SplitUrl split_endpoint(const std::string& url) {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw InvalidInputError("endpoint url must start with http:// or https://: " + url);
    }
    const std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

struct LlmClient::Impl {
    ClientConfig cfg;
    SplitUrl url;
    InFlightLimiter limiter;

    explicit Impl(ClientConfig c)
        : cfg(std::move(c)), url(split_endpoint(cfg.endpoint_url)), limiter(cfg.max_in_flight) {}
};

LlmClient::LlmClient(ClientConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {
    if (impl_->cfg.timeout.count() <= 0) throw InvalidInputError("client timeout must be > 0");
    if (impl_->cfg.max_retries < 0) throw InvalidInputError("max_retries must be >= 0");
}

LlmClient::~LlmClient() = default;

const ClientConfig& LlmClient::config() const { return impl_->cfg; }

CompletionResult LlmClient::complete(const std::string& system, const std::string& user) {
    impl_->limiter.acquire();
    struct Release {
        InFlightLimiter& l;
        ~Release() { l.release(); }
    } release{impl_->limiter};

    const ClientConfig& cfg = impl_->cfg;
    const std::string body = encode_completion_request({cfg.model_name, system, user});
    const auto delays = backoff_schedule(cfg);

    const auto started = std::chrono::steady_clock::now();
    std::string last_failure = "no attempt made";

    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(delays[static_cast<std::size_t>(attempt - 1)]);
        }

        httplib::Client http(impl_->url.base);
        const auto secs =
            std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout).count();
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
                               cfg.timeout % std::chrono::seconds(1))
                               .count();
        http.set_connection_timeout(secs, usecs);
        http.set_read_timeout(secs, usecs);
        http.set_write_timeout(secs, usecs);
        if (!cfg.api_key.empty()) http.set_bearer_token_auth(cfg.api_key);

        httplib::Result res = http.Post(impl_->url.path, body, "application/json");
        if (!res) {
            last_failure = "transport error: " + httplib::to_string(res.error());
            continue;  // retryable
        }
        if (res->status >= 500) {
            last_failure = "server error: HTTP " + std::to_string(res->status);
            continue;  // retryable
        }
        if (res->status < 200 || res->status >= 300) {
            throw ClientError("completion endpoint returned HTTP " + std::to_string(res->status) +
                              ": " + res->body);
        }
        // Success at the transport level; envelope problems are not retried.
        const std::string text = parse_completion_response(res->body);
        const auto latency = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                           started);
        return {text, latency};
    }
    throw ClientError("completion endpoint unreachable after " +
                      std::to_string(cfg.max_retries + 1) + " attempt(s); last failure: " +
                      last_failure);
}

void LatencyTracker::record(const std::string& scheme, double seconds) {
    std::lock_guard<std::mutex> lock(mu_);
    samples_[scheme].push_back(seconds);
}

bool LatencyTracker::empty() const {
    std::lock_guard<std::mutex> lock(mu_);
    return samples_.empty();
}

std::map<std::string, LatencyTracker::Summary> LatencyTracker::summarize() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::map<std::string, Summary> out;
    for (const auto& [scheme, samples] : samples_) {
        std::vector<double> sorted = samples;
        std::sort(sorted.begin(), sorted.end());
        Summary s;
        s.count = sorted.size();
        double total = 0.0;
        for (double v : sorted) total += v;
        s.mean_s = total / static_cast<double>(sorted.size());
        auto nearest_rank = [&sorted](double q) {
            const auto rank = static_cast<std::size_t>(
                std::ceil(q * static_cast<double>(sorted.size())));
            return sorted[std::min(sorted.size() - 1, rank == 0 ? 0 : rank - 1)];
        };
        s.p50_s = nearest_rank(0.50);
        s.p95_s = nearest_rank(0.95);
        out[scheme] = s;
    }
    return out;
}

}  // namespace prego
