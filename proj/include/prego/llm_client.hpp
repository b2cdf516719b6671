// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "prego/errors.hpp"

namespace prego {

struct ClientConfig {
    std::string endpoint_url;   // e.g. http://127.0.0.1:8089/complete
    std::string model_name{"default"};
    std::string api_key;        // optional bearer token
    std::chrono::milliseconds timeout{std::chrono::milliseconds(30000)};
    int max_retries{2};
    double temperature{0.0};    // held for adapters; the neutral wire envelope omits it
    int max_in_flight{4};
    std::chrono::milliseconds backoff_base{std::chrono::milliseconds(200)};
};

// PREGO_LLM_ENDPOINT, PREGO_LLM_MODEL, PREGO_LLM_API_KEY, PREGO_LLM_TIMEOUT_MS
// override the corresponding fields when set.
ClientConfig apply_env_overrides(ClientConfig cfg);

// Wire envelope helpers. Requests are {"model","system","user"}, responses
// {"text"}; parse(serialize(x)) == x on valid values.
struct CompletionRequest {
    std::string model;
    std::string system;
    std::string user;
    bool operator==(const CompletionRequest&) const = default;
};
std::string encode_completion_request(const CompletionRequest& req);
CompletionRequest parse_completion_request(const std::string& body);  // throws ProtocolError
std::string encode_completion_response(const std::string& text);
std::string parse_completion_response(const std::string& body);  // throws ProtocolError

// Deterministic backoff schedule: base * 2^attempt, one entry per retry.
std::vector<std::chrono::milliseconds> backoff_schedule(const ClientConfig& cfg);

struct CompletionResult {
    std::string text;
    std::chrono::duration<double> latency{};
};

// One POST per completion; retries transport errors and 5xx with exponential
// backoff, never parse-level failures. Shareable across threads; concurrent
// calls are capped at cfg.max_in_flight.
class LlmClient {
public:
    explicit LlmClient(ClientConfig cfg);
    ~LlmClient();
    LlmClient(const LlmClient&) = delete;
    LlmClient& operator=(const LlmClient&) = delete;

    CompletionResult complete(const std::string& system, const std::string& user);
    const ClientConfig& config() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Per-scheme wall-clock accounting for the run report.
class LatencyTracker {
public:
    void record(const std::string& scheme, double seconds);

    struct Summary {
        std::size_t count{};
        double mean_s{};
        double p50_s{};
        double p95_s{};
    };
    std::map<std::string, Summary> summarize() const;
    bool empty() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, std::vector<double>> samples_;
};

}  // namespace prego
