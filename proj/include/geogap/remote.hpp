#pragma once
// Client for an external embedding service.
//
//   POST <endpoint>   {"texts": ["...", ...]}
//   200 OK            {"embeddings": [[...], ...]}   one vector per text, same order

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "geogap/error.hpp"

namespace geogap {

inline constexpr const char* kEndpointEnv = "GEOGAP_EMBED_URL";
inline constexpr const char* kTokenEnv = "GEOGAP_EMBED_TOKEN";

struct RemoteOptions {
    std::string endpoint;  // http://host[:port]/path
    std::size_t batch = 32;
    int max_attempts = 4;
    std::chrono::milliseconds initial_backoff{200};
    std::chrono::seconds timeout{60};
    std::string auth_token;  // sent as "Authorization: Bearer <token>" when non-empty

    /// Fill endpoint and token from the environment where not already set.
    void apply_env() {
        if (endpoint.empty())
            if (const char* e = std::getenv(kEndpointEnv)) endpoint = e;
        if (auth_token.empty())
            if (const char* t = std::getenv(kTokenEnv)) auth_token = t;
    }
};

namespace detail {

struct ParsedUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

inline ParsedUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw usage_error("endpoint must be an absolute URL: '" + url + "'");
    if (url.compare(0, scheme_end, "http") != 0)
        throw usage_error("only http:// endpoints are supported: '" + url + "'");
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace detail

/// Embed `texts` through the remote service in batches, preserving input
/// order. Connection failures, 429 and 5xx responses are retried with
/// exponential backoff; any other failure is fatal.
inline std::vector<std::vector<double>> fetch_remote(const std::vector<std::string>& texts,
                                                     const RemoteOptions& opts) {
    std::vector<std::vector<double>> out;
    if (texts.empty()) return out;
    if (opts.batch == 0) throw usage_error("batch size must be positive");
    if (opts.max_attempts < 1) throw usage_error("max attempts must be at least 1");
    auto url = detail::split_url(opts.endpoint);

    httplib::Client client(url.origin);
    client.set_connection_timeout(opts.timeout);
    client.set_read_timeout(opts.timeout);
    httplib::Headers headers;
    if (!opts.auth_token.empty()) headers.emplace("Authorization", "Bearer " + opts.auth_token);

    out.reserve(texts.size());
    for (std::size_t begin = 0; begin < texts.size(); begin += opts.batch) {
        std::size_t end = std::min(texts.size(), begin + opts.batch);
        nlohmann::json req = {{"texts", std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(begin),
                                                                 texts.begin() + static_cast<std::ptrdiff_t>(end))}};
        std::string body = req.dump();

        std::string last_status = "no attempt made";
        auto backoff = opts.initial_backoff;
        bool done = false;
        for (int attempt = 1; attempt <= opts.max_attempts && !done; ++attempt) {
            auto res = client.Post(url.path, headers, body, "application/json");
            if (!res) {
                last_status = "connection error: " + httplib::to_string(res.error());
            } else if (res->status == 200) {
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(res->body);
                } catch (const nlohmann::json::parse_error& e) {
                    throw remote_error(std::string("embedding service returned invalid JSON: ") + e.what());
                }
                if (!j.contains("embeddings") || !j["embeddings"].is_array())
                    throw remote_error("embedding service response lacks an 'embeddings' array");
                const auto& embs = j["embeddings"];
                if (embs.size() != end - begin)
                    throw remote_error("embedding service returned " + std::to_string(embs.size()) +
                                       " vectors for " + std::to_string(end - begin) + " texts");
                for (const auto& e : embs) {
                    if (!e.is_array()) throw remote_error("embedding is not an array");
                    out.push_back(e.get<std::vector<double>>());
                }
                done = true;
                continue;
            } else {
                last_status = "HTTP " + std::to_string(res->status);
                bool transient = res->status == 429 || res->status >= 500;
                if (!transient) throw remote_error("embedding service rejected request: " + last_status);
            }
            if (attempt < opts.max_attempts) {
                std::this_thread::sleep_for(backoff);
                backoff *= 2;
            }
        }
        if (!done)
            throw remote_error("embedding service failed after " + std::to_string(opts.max_attempts) +
                               " attempts; last status: " + last_status);
    }
    return out;
}

} // namespace geogap
