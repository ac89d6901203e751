#include "benchgen/providers.hpp"

#include <cmath>

#include "benchgen/error.hpp"
#include "benchgen/text.hpp"
#include "benchgen/worker_pool.hpp"

namespace benchgen {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string joined_prompt(const ChatRequest& req) {
    std::string all;
    for (const auto& m : req.messages) {
        all += m.text;
        all += '\n';
    }
    return all;
}

}  // namespace

ChatRequest ChatRequest::user(std::string prompt, double temperature) {
    ChatRequest r;
    r.messages.push_back({"user", std::move(prompt)});
    r.temperature = temperature;
    return r;
}

void ProviderConfig::validate() const {
    if (kind != "mock" && kind != "openai") throw ConfigError("provider " + name + ": unknown kind '" + kind + "'");
    if (price_prompt_per_1k < 0.0 || price_completion_per_1k < 0.0)
        throw ConfigError("provider " + name + ": prices must be non-negative");
    if (!(timeout_seconds > 0.0)) throw ConfigError("provider " + name + ": timeout must be positive");
    if (max_retries < 0) throw ConfigError("provider " + name + ": max_retries must be non-negative");
    if (backoff_base_seconds < 0.0 || backoff_factor < 1.0)
        throw ConfigError("provider " + name + ": invalid backoff settings");
    if (kind == "mock" && embed_dimension < 2)
        throw ConfigError("provider " + name + ": embed_dimension must be >= 2");
    if (latency_seconds < 0.0) throw ConfigError("provider " + name + ": latency must be non-negative");
    if (kind == "openai" && endpoint.empty()) throw ConfigError("provider " + name + ": endpoint required");
}

double price_tokens(const ProviderConfig& cfg, std::uint64_t prompt_tokens, std::uint64_t completion_tokens) {
    return double(prompt_tokens) / 1000.0 * cfg.price_prompt_per_1k +
           double(completion_tokens) / 1000.0 * cfg.price_completion_per_1k;
}

std::uint64_t estimate_tokens(std::string_view s) {
    return static_cast<std::uint64_t>(std::ceil(1.3 * double(text::whitespace_token_count(s))));
}

Provider::Provider(ProviderConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

ChatResult Provider::chat(const ChatRequest& req) {
    if (req.messages.empty()) throw ValidationError("chat request needs at least one message");
    if (req.temperature < 0.0) throw ValidationError("temperature must be non-negative");
    ChatResult r = do_chat(req);
    record(r.usage);
    return r;
}

EmbedResult Provider::embed(std::string_view text) {
    if (text.empty()) throw ValidationError("embed: empty text");
    EmbedResult r = do_embed(text);
    record(r.usage);
    return r;
}

std::vector<ChatResult> Provider::chat_batch(std::span<const ChatRequest> reqs, WorkerPool* pool) {
    return parallel_map(pool, reqs.size(), [&](std::size_t i) { return chat(reqs[i]); });
}

UsageMeter Provider::usage() const {
    std::lock_guard lock(meter_mu_);
    return total_;
}

void Provider::record(const UsageMeter& delta) {
    std::lock_guard lock(meter_mu_);
    total_ += delta;
}

MockProvider::MockProvider(ProviderConfig cfg) : Provider(std::move(cfg)) {
    queue_.assign(cfg_.script.begin(), cfg_.script.end());
}

std::size_t MockProvider::remaining() const {
    std::lock_guard lock(mu_);
    return queue_.size();
}

void MockProvider::push(std::string response) {
    std::lock_guard lock(mu_);
    queue_.push_back(std::move(response));
}

ChatResult MockProvider::respond(const ChatRequest& req, std::string text) const {
    ChatResult r;
    r.usage.prompt_tokens = estimate_tokens(joined_prompt(req));
    r.usage.completion_tokens = estimate_tokens(text);
    r.usage.estimated = true;
    r.usage.wall_seconds = cfg_.latency_seconds;
    r.usage.dollars = price_tokens(cfg_, r.usage.prompt_tokens, r.usage.completion_tokens);
    r.text = std::move(text);
    return r;
}

ChatResult MockProvider::do_chat(const ChatRequest& req) {
    std::string next;
    {
        std::lock_guard lock(mu_);
        if (queue_.empty()) throw ProviderError("mock script exhausted");
        next = std::move(queue_.front());
        queue_.pop_front();
    }
    return respond(req, std::move(next));
}

std::vector<ChatResult> MockProvider::chat_batch(std::span<const ChatRequest> reqs, WorkerPool*) {
    for (const auto& req : reqs) {
        if (req.messages.empty()) throw ValidationError("chat request needs at least one message");
    }
    std::vector<std::string> taken;
    {
        std::lock_guard lock(mu_);
        if (queue_.size() < reqs.size()) throw ProviderError("mock script exhausted");
        for (std::size_t i = 0; i < reqs.size(); ++i) {
            taken.push_back(std::move(queue_.front()));
            queue_.pop_front();
        }
    }
    std::vector<ChatResult> out;
    out.reserve(reqs.size());
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        out.push_back(respond(reqs[i], std::move(taken[i])));
        record(out.back().usage);
    }
    return out;
}

EmbedResult MockProvider::do_embed(std::string_view text) {
    std::uint64_t state = fnv1a(text) ^ (cfg_.seed * 0x9E3779B97F4A7C15ULL);
    EmbedResult r;
    r.vector.resize(static_cast<std::size_t>(cfg_.embed_dimension));
    double norm2 = 0.0;
    while (norm2 == 0.0) {
        norm2 = 0.0;
        for (auto& v : r.vector) {
            v = double(splitmix64(state) >> 11) * 0x1.0p-53 * 2.0 - 1.0;
            norm2 += v * v;
        }
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& v : r.vector) v *= inv;
    r.usage.prompt_tokens = estimate_tokens(text);
    r.usage.estimated = true;
    r.usage.wall_seconds = cfg_.latency_seconds;
    r.usage.dollars = price_tokens(cfg_, r.usage.prompt_tokens, 0);
    return r;
}

std::shared_ptr<Provider> make_provider(const ProviderConfig& cfg) {
    if (cfg.kind == "mock") return std::make_shared<MockProvider>(cfg);
    if (cfg.kind == "openai") return std::make_shared<OpenAiProvider>(cfg);
    throw ConfigError("provider " + cfg.name + ": unknown kind '" + cfg.kind + "'");
}

std::shared_ptr<MockProvider> mock_script(std::vector<std::string> responses, int embed_dimension,
                                          std::uint64_t seed) {
    ProviderConfig cfg;
    cfg.name = "mock";
    cfg.kind = "mock";
    cfg.script = std::move(responses);
    cfg.embed_dimension = embed_dimension;
    cfg.seed = seed;
    return std::make_shared<MockProvider>(std::move(cfg));
}

}  // namespace benchgen
