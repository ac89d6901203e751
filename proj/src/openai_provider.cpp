#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "benchgen/error.hpp"
#include "benchgen/providers.hpp"

namespace benchgen {

using json = nlohmann::json;

namespace {

struct Endpoint {
    std::string origin;     // scheme://host[:port]
    std::string base_path;  // "/v1" or ""
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint must include a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    if (path_start == std::string::npos) {
        e.origin = url;
    } else {
        e.origin = url.substr(0, path_start);
        e.base_path = url.substr(path_start);
        while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
    }
    return e;
}

// POSTs `body` with retry; returns the parsed JSON of the first 200 reply.
json post_with_retry(const ProviderConfig& cfg, const std::string& path, const json& body,
                     const std::string& api_key) {
    const Endpoint ep = split_endpoint(cfg.endpoint);
    httplib::Client client(ep.origin);
    const auto timeout = std::chrono::duration<double>(cfg.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    const std::string payload = body.dump();
    const int attempts = 1 + cfg.max_retries;
    bool last_timed_out = false;
    std::string last_error;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        const auto start = std::chrono::steady_clock::now();
        auto res = client.Post(ep.base_path + path, headers, payload, "application/json");
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!res) {
            const auto err = res.error();
            last_timed_out = err == httplib::Error::ConnectionTimeout ||
                             (err == httplib::Error::Read && elapsed >= 0.9 * cfg.timeout_seconds);
            last_error = httplib::to_string(err);
        } else if (res->status == 200) {
            try {
                return json::parse(res->body);
            } catch (const json::parse_error& e) {
                throw ProviderError(cfg.name + ": malformed response body: " + e.what());
            }
        } else if (res->status == 429 || res->status >= 500) {
            last_timed_out = false;
            last_error = "HTTP " + std::to_string(res->status);
        } else {
            throw ProviderError(cfg.name + ": HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
        }
        if (attempt + 1 < attempts) {
            const double delay = cfg.backoff_base_seconds * std::pow(cfg.backoff_factor, attempt);
            spdlog::warn("{}: attempt {} failed ({}), retrying in {:.2f}s", cfg.name, attempt + 1, last_error, delay);
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
    }
    const std::string msg = cfg.name + ": " + last_error + " after " + std::to_string(attempts) + " attempts";
    if (last_timed_out) throw TimeoutError(msg);
    throw ProviderError(msg);
}

UsageMeter usage_from(const ProviderConfig& cfg, const json& reply, std::uint64_t est_prompt,
                      std::uint64_t est_completion, double wall) {
    UsageMeter u;
    u.wall_seconds = wall;
    const auto it = reply.find("usage");
    if (it != reply.end() && it->is_object() && it->contains("prompt_tokens")) {
        u.prompt_tokens = it->value("prompt_tokens", std::uint64_t{0});
        u.completion_tokens = it->value("completion_tokens", std::uint64_t{0});
    } else {
        u.prompt_tokens = est_prompt;
        u.completion_tokens = est_completion;
        u.estimated = true;
    }
    u.dollars = price_tokens(cfg, u.prompt_tokens, u.completion_tokens);
    return u;
}

}  // namespace

OpenAiProvider::OpenAiProvider(ProviderConfig cfg) : Provider(std::move(cfg)) {}

std::string OpenAiProvider::api_key() const {
    if (cfg_.credential_env.empty()) return {};
    const char* v = std::getenv(cfg_.credential_env.c_str());
    if (v == nullptr || *v == '\0')
        throw ConfigError(cfg_.name + ": credential variable " + cfg_.credential_env + " is not set");
    return v;
}

ChatResult OpenAiProvider::do_chat(const ChatRequest& req) {
    const std::string key = api_key();
    json body;
    body["model"] = cfg_.model;
    body["temperature"] = req.temperature;
    if (req.seed) body["seed"] = *req.seed;
    body["messages"] = json::array();
    std::string prompt_text;
    for (const auto& m : req.messages) {
        body["messages"].push_back({{"role", m.role}, {"content", m.text}});
        prompt_text += m.text + "\n";
    }

    const auto start = std::chrono::steady_clock::now();
    const json reply = post_with_retry(cfg_, "/chat/completions", body, key);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ChatResult r;
    try {
        r.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ProviderError(cfg_.name + ": response has no message content (" + e.what() + ")");
    }
    r.usage = usage_from(cfg_, reply, estimate_tokens(prompt_text), estimate_tokens(r.text), wall);
    return r;
}

EmbedResult OpenAiProvider::do_embed(std::string_view text) {
    const std::string key = api_key();
    json body;
    body["model"] = cfg_.embed_model.empty() ? cfg_.model : cfg_.embed_model;
    body["input"] = std::string(text);

    const auto start = std::chrono::steady_clock::now();
    const json reply = post_with_retry(cfg_, "/embeddings", body, key);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    EmbedResult r;
    try {
        r.vector = reply.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ProviderError(cfg_.name + ": response has no embedding (" + e.what() + ")");
    }
    r.usage = usage_from(cfg_, reply, estimate_tokens(text), 0, wall);
    return r;
}

}  // namespace benchgen
