#include "benchgen/config.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "benchgen/error.hpp"
#include "benchgen/text.hpp"

namespace benchgen {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
    }

    template <typename T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw ConfigError(path_ + "." + key + " has the wrong type");
        }
    }

    std::optional<Section> sub(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return std::nullopt;
        return Section(*it, path_ + "." + key);
    }

    void finish() const {
        for (const auto& [key, _] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError("unknown key " + path_ + "." + key);
        }
    }

    const json& raw() const { return j_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return {};
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

ProviderConfig parse_provider(const std::string& name, const json& j, const std::filesystem::path& base) {
    Section s(j, "providers." + name);
    ProviderConfig c;
    c.name = name;
    s.read("kind", c.kind);
    s.read("model", c.model);
    s.read("embed_model", c.embed_model);
    s.read("endpoint", c.endpoint);
    s.read("credential_env", c.credential_env);
    s.read("price_prompt_per_1k", c.price_prompt_per_1k);
    s.read("price_completion_per_1k", c.price_completion_per_1k);
    s.read("timeout_seconds", c.timeout_seconds);
    s.read("max_retries", c.max_retries);
    s.read("backoff_base_seconds", c.backoff_base_seconds);
    s.read("backoff_factor", c.backoff_factor);
    s.read("script", c.script);
    std::string script_file;
    s.read("script_file", script_file);
    s.read("seed", c.seed);
    s.read("embed_dimension", c.embed_dimension);
    s.read("latency_seconds", c.latency_seconds);
    s.finish();
    if (!script_file.empty()) {
        const auto path = resolve(base, script_file);
        if (!std::filesystem::exists(path)) throw ConfigError("script file not found: " + path.string());
        for (auto& r : parse_script(read_file(path))) c.script.push_back(std::move(r));
    }
    try {
        c.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string(e.what()));
    }
    return c;
}

}  // namespace

const ProviderConfig& RunConfig::provider(const std::string& name, const std::string& role) const {
    if (name.empty()) throw ConfigError("no " + role + " provider configured");
    const auto it = providers.find(name);
    if (it == providers.end()) throw ConfigError(role + " provider '" + name + "' is not defined under providers");
    return it->second;
}

void RunConfig::validate() const {
    for (const auto& [role, name] : {std::pair<std::string, std::string>{"generator", generator_provider},
                                     {"judge", judge_provider},
                                     {"embedding", embedding_provider}}) {
        if (!name.empty()) provider(name, role);
    }
    if (option_count < 2 || option_count > 26) throw ConfigError("generator.option_count must be in [2, 26]");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (!(report_fraction > 0.0 && report_fraction <= 1.0)) throw ConfigError("report.fraction must be in (0, 1]");
    if (judge_parse_retries < 0) throw ConfigError("judge.parse_retries must be >= 0");
    try {
        generator.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_config(const std::string& content, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(content);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    Section top(root, "config");
    top.read("workers", cfg.workers);
    if (auto providers = top.sub("providers")) {
        for (const auto& [name, body] : providers->raw().items()) cfg.providers[name] = parse_provider(name, body, base_dir);
    }
    if (auto g = top.sub("generator")) {
        auto& s = cfg.generator;
        g->read("provider", cfg.generator_provider);
        g->read("samples", s.samples);
        g->read("attempts", s.attempts);
        g->read("references", s.references);
        g->read("candidates", s.candidates);
        g->read("max_draft_retries", s.max_draft_retries);
        g->read("parse_retries", s.parse_retries);
        g->read("temperature", s.temperature);
        g->read("describe_task", s.describe_task);
        g->read("max_failure_fraction", s.max_failure_fraction);
        g->read("generator_id", s.generator_id);
        g->read("option_count", cfg.option_count);
        if (g->raw().contains("seed")) cfg.seed_given = true;
        g->read("seed", s.seed);
        std::string mode = "staged";
        g->read("mode", mode);
        if (mode == "staged") {
            s.mode = generator::Mode::Staged;
        } else if (mode == "direct") {
            s.mode = generator::Mode::Direct;
        } else {
            throw ConfigError("generator.mode must be 'staged' or 'direct'");
        }
        g->finish();
    }
    if (auto j = top.sub("judge")) {
        j->read("provider", cfg.judge_provider);
        j->read("parse_retries", cfg.judge_parse_retries);
        j->finish();
    }
    if (auto e = top.sub("embedding")) {
        e->read("provider", cfg.embedding_provider);
        e->finish();
    }
    if (auto p = top.sub("paths")) {
        std::string assets, output, demands;
        p->read("assets", assets);
        p->read("output", output);
        p->read("demands", demands);
        p->finish();
        cfg.assets_dir = resolve(base_dir, assets);
        cfg.output_dir = resolve(base_dir, output);
        cfg.demands_dir = resolve(base_dir, demands);
    }
    if (auto r = top.sub("report")) {
        r->read("fraction", cfg.report_fraction);
        r->read("method", cfg.report_method);
        r->finish();
    }
    top.finish();
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
    return parse_config(read_file(path), path.parent_path());
}

std::string serialize_config(const RunConfig& cfg) {
    ordered_json root;
    root["workers"] = cfg.workers;
    ordered_json providers = ordered_json::object();
    for (const auto& [name, c] : cfg.providers) {
        ordered_json p;
        p["kind"] = c.kind;
        if (!c.model.empty()) p["model"] = c.model;
        if (!c.embed_model.empty()) p["embed_model"] = c.embed_model;
        if (!c.endpoint.empty()) p["endpoint"] = c.endpoint;
        if (!c.credential_env.empty()) p["credential_env"] = c.credential_env;
        p["price_prompt_per_1k"] = c.price_prompt_per_1k;
        p["price_completion_per_1k"] = c.price_completion_per_1k;
        if (c.kind == "mock") {
            p["seed"] = c.seed;
            p["embed_dimension"] = c.embed_dimension;
            p["latency_seconds"] = c.latency_seconds;
            if (!c.script.empty()) p["script"] = c.script;
        } else {
            p["timeout_seconds"] = c.timeout_seconds;
            p["max_retries"] = c.max_retries;
        }
        providers[name] = p;
    }
    root["providers"] = providers;
    const auto& s = cfg.generator;
    ordered_json g;
    g["provider"] = cfg.generator_provider;
    g["samples"] = s.samples;
    g["attempts"] = s.attempts;
    g["references"] = s.references;
    g["candidates"] = s.candidates;
    g["option_count"] = cfg.option_count;
    g["max_draft_retries"] = s.max_draft_retries;
    g["parse_retries"] = s.parse_retries;
    g["temperature"] = s.temperature;
    if (cfg.seed_given) g["seed"] = s.seed;
    g["mode"] = s.mode == generator::Mode::Staged ? "staged" : "direct";
    g["describe_task"] = s.describe_task;
    g["generator_id"] = s.generator_id;
    root["generator"] = g;
    if (!cfg.judge_provider.empty())
        root["judge"] = {{"provider", cfg.judge_provider}, {"parse_retries", cfg.judge_parse_retries}};
    if (!cfg.embedding_provider.empty()) root["embedding"] = {{"provider", cfg.embedding_provider}};
    root["report"] = {{"fraction", cfg.report_fraction}, {"method", cfg.report_method}};
    return root.dump(2) + "\n";
}

std::vector<std::string> parse_script(const std::string& content) {
    std::vector<std::string> out;
    std::size_t line_no = 0;
    for (std::string_view raw : text::split_lines(content)) {
        ++line_no;
        if (text::trim(raw).empty()) continue;
        try {
            const json j = json::parse(raw);
            if (!j.is_string()) throw FormatError("");
            out.push_back(j.get<std::string>());
        } catch (const std::exception&) {
            throw FormatError("script line " + std::to_string(line_no) + ": expected a JSON string");
        }
    }
    return out;
}

std::string serialize_script(const std::vector<std::string>& responses) {
    std::string out;
    for (const auto& r : responses) out += json(r).dump() + "\n";
    return out;
}

std::vector<AssessmentDemand> parse_demands(const std::string& content, const std::string& fallback_name) {
    std::vector<AssessmentDemand> out;
    std::optional<AssessmentDemand> current;
    bool in_text = false;
    auto flush = [&] {
        if (!current) return;
        current->text = std::string(text::trim(current->text));
        if (current->text.empty()) throw FormatError("subset '" + current->name + "' has no assessment demands");
        out.push_back(std::move(*current));
        current.reset();
        in_text = false;
    };
    bool any_subset = false;
    for (std::string_view raw : text::split_lines(content)) {
        const std::string_view line = text::trim(raw);
        if (text::find_ci(line, "subset name:") == 0) {
            flush();
            any_subset = true;
            current = AssessmentDemand{std::string(text::trim(line.substr(12))), "", 10};
            continue;
        }
        if (current && text::find_ci(line, "assessment demands:") == 0) {
            in_text = true;
            current->text = std::string(text::trim(line.substr(19)));
            continue;
        }
        if (current && in_text) {
            current->text += "\n";
            current->text += raw;
        }
    }
    flush();
    if (!any_subset) {
        const auto t = text::trim(content);
        if (t.empty()) throw FormatError("demand file is empty");
        out.push_back(AssessmentDemand{fallback_name, std::string(t), 10});
    }
    return out;
}

std::string serialize_demands(const std::vector<AssessmentDemand>& demands) {
    std::string out;
    for (std::size_t i = 0; i < demands.size(); ++i) {
        if (i) out += "\n";
        out += "Subset Name: " + demands[i].name + "\nAssessment Demands:" + demands[i].text + "\n";
    }
    return out;
}

}  // namespace benchgen
