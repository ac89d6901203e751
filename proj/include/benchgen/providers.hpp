#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "benchgen/core.hpp"

namespace benchgen {

class WorkerPool;

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string text;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 1.0;
    std::optional<std::int64_t> seed;

    static ChatRequest user(std::string prompt, double temperature = 1.0);
};

struct ChatResult {
    std::string text;
    UsageMeter usage;  // delta for this call
};

struct EmbedResult {
    std::vector<double> vector;
    UsageMeter usage;
};

struct ProviderConfig {
    std::string name;
    std::string kind = "mock";  // "mock" | "openai"
    std::string model;
    std::string embed_model;
    std::string endpoint;
    std::string credential_env;  // environment variable holding the API key
    double price_prompt_per_1k = 0.0;
    double price_completion_per_1k = 0.0;
    double timeout_seconds = 60.0;
    int max_retries = 4;  // attempts = 1 + max_retries
    double backoff_base_seconds = 1.0;
    double backoff_factor = 2.0;

    // Mock backend.
    std::vector<std::string> script;
    std::uint64_t seed = 0;
    int embed_dimension = 16;
    double latency_seconds = 0.0;  // virtual wall time charged per call

    // Throws ConfigError on negative prices, non-positive timeout, unknown kind.
    void validate() const;
};

// Dollars for the given token counts at the configured per-1k prices.
double price_tokens(const ProviderConfig& cfg, std::uint64_t prompt_tokens, std::uint64_t completion_tokens);

// Heuristic when a backend does not report usage: ceil(1.3 x whitespace tokens).
std::uint64_t estimate_tokens(std::string_view text);

// A chat/embedding backend. Handles are shared across threads; the
// cumulative meter is updated under a lock.
class Provider {
public:
    explicit Provider(ProviderConfig cfg);
    virtual ~Provider() = default;

    Provider(const Provider&) = delete;
    Provider& operator=(const Provider&) = delete;

    ChatResult chat(const ChatRequest& req);
    EmbedResult embed(std::string_view text);

    // Results in request order. The default fans out over `pool`; the
    // mock overrides it to bind responses to positions before any call runs,
    // so the outcome never depends on scheduling.
    virtual std::vector<ChatResult> chat_batch(std::span<const ChatRequest> reqs, WorkerPool* pool);

    // True when outputs are a pure function of configuration and call order.
    virtual bool deterministic() const { return false; }

    const ProviderConfig& config() const noexcept { return cfg_; }
    UsageMeter usage() const;

protected:
    virtual ChatResult do_chat(const ChatRequest& req) = 0;
    virtual EmbedResult do_embed(std::string_view text) = 0;
    void record(const UsageMeter& delta);

    ProviderConfig cfg_;

private:
    mutable std::mutex meter_mu_;
    UsageMeter total_;
};

// Scripted backend for offline runs: chat pops canned responses in call
// order, embed returns a unit vector derived from (seed, text).
class MockProvider final : public Provider {
public:
    explicit MockProvider(ProviderConfig cfg);

    std::vector<ChatResult> chat_batch(std::span<const ChatRequest> reqs, WorkerPool* pool) override;
    bool deterministic() const override { return true; }

    std::size_t remaining() const;
    void push(std::string response);

protected:
    ChatResult do_chat(const ChatRequest& req) override;
    EmbedResult do_embed(std::string_view text) override;

private:
    ChatResult respond(const ChatRequest& req, std::string text) const;

    mutable std::mutex mu_;
    std::deque<std::string> queue_;
};

// OpenAI-compatible HTTP backend (chat/completions and embeddings) with
// bounded exponential backoff on transport errors, 429 and 5xx.
class OpenAiProvider final : public Provider {
public:
    explicit OpenAiProvider(ProviderConfig cfg);

protected:
    ChatResult do_chat(const ChatRequest& req) override;
    EmbedResult do_embed(std::string_view text) override;

private:
    std::string api_key() const;
};

std::shared_ptr<Provider> make_provider(const ProviderConfig& cfg);

// Convenience constructor for tests and demos.
std::shared_ptr<MockProvider> mock_script(std::vector<std::string> responses, int embed_dimension = 16,
                                          std::uint64_t seed = 0);

}  // namespace benchgen
