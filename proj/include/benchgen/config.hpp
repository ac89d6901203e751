#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "benchgen/core.hpp"
#include "benchgen/generator.hpp"
#include "benchgen/providers.hpp"

namespace benchgen {

// Whole-run configuration read from one JSON file. Relative paths inside it
// resolve against the file's directory; secrets come from the environment
// variables named by each provider's credential_env.
struct RunConfig {
    std::map<std::string, ProviderConfig> providers;
    std::string generator_provider;
    std::string judge_provider;
    std::string embedding_provider;

    generator::Settings generator;
    int option_count = 10;
    bool seed_given = false;
    int judge_parse_retries = 2;

    std::filesystem::path assets_dir;  // optional prompt overrides
    std::filesystem::path output_dir;
    std::filesystem::path demands_dir;

    double report_fraction = 0.2;
    std::string report_method = "benchgen";

    int workers = 8;

    // Throws ConfigError when `name` is empty or not a configured provider.
    const ProviderConfig& provider(const std::string& name, const std::string& role) const;
    void validate() const;
};

RunConfig parse_config(const std::string& content, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& cfg);

// Mock scripts: one JSON string per line.
std::vector<std::string> parse_script(const std::string& content);
std::string serialize_script(const std::vector<std::string>& responses);

// Demand files hold "Subset Name:" / "Assessment Demands:" blocks. A file
// without any "Subset Name:" line is a single demand named `fallback_name`.
std::vector<AssessmentDemand> parse_demands(const std::string& content, const std::string& fallback_name = "demand");
std::string serialize_demands(const std::vector<AssessmentDemand>& demands);

}  // namespace benchgen
