#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace benchgen {

using Timestamp = std::chrono::sys_seconds;

// ISO-8601 UTC, second precision: "2024-05-01T12:00:00Z".
std::string format_utc(Timestamp t);
Timestamp parse_utc(const std::string& s);

// Token, time and money spent on provider calls. Accumulates by addition.
struct UsageMeter {
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
    double wall_seconds = 0.0;
    double dollars = 0.0;
    // True once any contributing call had its token counts estimated
    // rather than reported by the backend.
    bool estimated = false;

    UsageMeter& operator+=(const UsageMeter& other);
    friend UsageMeter operator+(UsageMeter a, const UsageMeter& b) { return a += b; }
    bool operator==(const UsageMeter&) const = default;
};

struct AssessmentDemand {
    std::string name;
    std::string text;
    int option_count = 10;

    bool operator==(const AssessmentDemand&) const = default;
};

// One multiple-choice item. `label` is a 0-based index into `options`;
// it is stored signed so that out-of-range values read from disk can be
// reported by validate_sample instead of being lost in conversion.
struct Sample {
    std::string id;
    std::string question;
    std::string rationale;
    std::vector<std::string> options;
    std::int64_t label = 0;
    std::optional<double> difficulty_label;
    std::optional<int> declared_level;
    std::map<std::string, std::string> attributes;
    std::vector<std::string> strategies;
    std::int64_t reference_uses = 0;

    bool operator==(const Sample&) const = default;
};

struct Benchmark {
    AssessmentDemand demand;
    std::vector<Sample> samples;  // generation order
    std::string generator_id;
    Timestamp created_at{};
    UsageMeter usage;

    bool operator==(const Benchmark&) const = default;
};

struct OpenTextItem {
    std::string question;
    std::string reference_solution;
    std::string reference_answer;

    bool operator==(const OpenTextItem&) const = default;
};

// Every invariant violation of `s`; empty means valid. When `attempts` is
// given, a present difficulty_label must also be a multiple of 1/attempts.
std::vector<std::string> validate_sample(const Sample& s, std::optional<int> attempts = std::nullopt);

// Throws ValidationError listing violations when `s` is invalid or has an
// empty rationale.
OpenTextItem mcq_to_otg(const Sample& s);

// "s000001" style ids, 1-based.
std::string sample_id_for(std::size_t ordinal);

// Renders "A. first\nB. second..." as shown to models.
std::string render_options(const std::vector<std::string>& options);

// Question followed by its lettered options.
std::string render_question_with_options(const Sample& s);

// Line-delimited benchmark file. The first line may be a header record
// (recognised by its "demand" field); every other non-blank line is one
// sample. Throws FormatError naming the line and field on malformed input.
Benchmark parse_benchmark(const std::string& content);
std::string serialize_benchmark(const Benchmark& b);
Benchmark read_benchmark(const std::filesystem::path& path);
void write_benchmark(const Benchmark& b, const std::filesystem::path& path);

std::string serialize_open_text(const std::vector<OpenTextItem>& items);

// Writes to a sibling temporary file then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace benchgen
