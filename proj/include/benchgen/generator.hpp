#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "benchgen/core.hpp"
#include "benchgen/error.hpp"
#include "benchgen/prompts.hpp"
#include "benchgen/providers.hpp"

namespace benchgen {

class WorkerPool;

// Warning sink shared by a pipeline run. Every entry is also logged.
class Diagnostics {
public:
    void warn(std::string message);
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    std::vector<std::string> warnings_;
};

namespace generator {

enum class Mode {
    Staged,  // full pipeline
    Direct,  // single-prompt baseline with a declared difficulty level
};

struct Settings {
    int samples = 10;          // N
    int attempts = 10;         // T, test-taker answers per sample
    int references = 8;        // R
    int candidates = 5;        // L
    int max_draft_retries = 3;
    int parse_retries = 2;
    double temperature = 1.0;
    std::uint64_t seed = 0;
    Mode mode = Mode::Staged;
    bool describe_task = true;
    double max_failure_fraction = 0.2;
    std::string generator_id = "benchgen";

    void validate() const;  // throws ValidationError
};

struct TaskDescriptions {
    std::string task;
    std::string query;
    std::string option;
};

// Attribute dimensions in the order the model listed them.
struct AttributeSet {
    std::vector<std::pair<std::string, std::vector<std::string>>> dimensions;
    std::size_t value_count() const;
};

struct Strategy {
    std::string name;
    std::vector<std::string> tiers;  // easiest first
};

struct StrategySet {
    std::vector<Strategy> strategies;
};

struct StageEntry {
    std::string stage;
    bool passed = false;
    int attempt = 0;  // 0-based regeneration count
    std::string detail;
};

struct DraftOutcome {
    Sample sample;
    std::vector<StageEntry> stage_log;
};

class DraftFailure : public Error {
public:
    DraftFailure(const std::string& what, std::vector<StageEntry> log) : Error(what), log_(std::move(log)) {}
    const std::vector<StageEntry>& stage_log() const noexcept { return log_; }

private:
    std::vector<StageEntry> log_;
};

// Everything injected into one drafting prompt.
struct DraftRequest {
    AssessmentDemand demand;
    TaskDescriptions descriptions;
    std::map<std::string, std::string> attributes;
    std::vector<std::string> strategy_tiers;
    std::vector<Sample> references;
    std::optional<int> level;  // direct mode only
    Mode mode = Mode::Staged;
    double temperature = 1.0;
};

struct DifficultyEstimate {
    double beta = 0.0;
    std::vector<std::optional<std::size_t>> answers;  // nullopt = unparseable
    std::vector<std::string> responses;
    std::size_t unparseable = 0;
};

enum class Resolution { NoConflict, ContrastiveJudge };

// vote_counts covers parseable answers; together with `unparseable`
// it sums to T.
struct ConflictVerdict {
    std::optional<std::size_t> voted_answer;
    std::map<std::size_t, std::size_t> vote_counts;
    std::size_t unparseable = 0;
    std::size_t final_label = 0;
    std::string final_rationale;
    Resolution resolved_by = Resolution::NoConflict;
    std::optional<double> judge_faithfulness;
};

// ---- parsing of model output -------------------------------------------

std::optional<TaskDescriptions> parse_task_descriptions(std::string_view response);
AttributeSet parse_attributes(std::string_view response, Diagnostics& diag);
StrategySet parse_strategies(std::string_view response, Diagnostics& diag);

struct ParsedDraft {
    std::vector<StageEntry> stages;  // up to and including the first failure
    std::optional<Sample> sample;    // set when every stage passed
};
ParsedDraft parse_draft(std::string_view response, int option_count, Mode mode);

// Letter after the last "Answer:" marker, if within range.
std::optional<std::size_t> extract_answer(std::string_view response, std::size_t option_count);

struct JudgeChoice {
    double faithfulness = 0.0;
    std::optional<std::size_t> label;  // nullopt = "None"
};
std::optional<JudgeChoice> parse_comparison_judgement(std::string_view response, std::size_t option_count);

// ---- prompt assembly ----------------------------------------------------

std::string build_draft_prompt(const DraftRequest& req, const prompts::Library& lib);
std::string build_test_taker_prompt(const Sample& s, const prompts::Library& lib);

// ---- pipeline operations ------------------------------------------------

TaskDescriptions describe_task(const AssessmentDemand& demand, Provider& provider, const prompts::Library& lib,
                               int parse_retries, Diagnostics& diag);

AttributeSet generate_attributes(const AssessmentDemand& demand, Provider& provider, const prompts::Library& lib,
                                 int parse_retries, Diagnostics& diag);

StrategySet generate_strategies(const AssessmentDemand& demand, Provider& provider, const prompts::Library& lib,
                                int parse_retries, Diagnostics& diag);

// One candidate; regenerates from scratch on any stage failure, up to
// max_draft_retries more times. Throws DraftFailure with the full log.
DraftOutcome draft_sample(const DraftRequest& req, Provider& provider, const prompts::Library& lib,
                          int max_draft_retries);

// `count` candidates drafted together; failed slots are redrafted in
// later rounds. Returns the successful ones in slot order plus the log of
// every slot.
struct CandidateBatch {
    std::vector<DraftOutcome> drafted;
    std::vector<std::vector<StageEntry>> slot_logs;
};
CandidateBatch draft_candidates(const DraftRequest& req, int count, Provider& provider, const prompts::Library& lib,
                                int max_draft_retries, WorkerPool* pool);

// Asks the provider `attempts` times; beta is the mismatch fraction with
// unparseable answers counted as mismatches.
DifficultyEstimate estimate_difficulty(const Sample& s, Provider& provider, const prompts::Library& lib,
                                       int attempts, double temperature, WorkerPool* pool, Diagnostics& diag);

// Mismatch fraction of `answers` against `label`.
double mismatch_fraction(const std::vector<std::optional<std::size_t>>& answers, std::size_t label);

ConflictVerdict resolve_conflict(const Sample& s, const DifficultyEstimate& estimate, Provider& provider,
                                 const prompts::Library& lib, int parse_retries, Diagnostics& diag);

// beta * 0.9^(uses / references)
double calibrated_difficulty(double beta, std::int64_t uses, int references);

// Picks up to `references` samples from the 2R best by calibrated
// difficulty, in shuffled order, and bumps their reference_uses.
std::vector<Sample> select_references(std::vector<Sample>& pool, int references, std::mt19937_64& rng);

// Text used for lexical statistics: question followed by options.
std::string lexical_text(const Sample& s);

// Entropy gain of adding each candidate to the reference corpus.
std::vector<double> diversity_scores(std::span<const std::string> candidates, std::span<const std::string> references);

// Index of the candidate with the greatest entropy gain (lowest index on ties).
std::size_t boost_diversity(std::span<const std::string> candidates, std::span<const std::string> references);
std::size_t boost_diversity(const std::vector<Sample>& candidates, const std::vector<Sample>& references);

// Tier index for sample `index` of `total` on a strategy with `tiers` tiers.
std::size_t tier_for(std::size_t index, std::size_t total, std::size_t tiers);

struct SampleLog {
    std::size_t index = 0;
    std::optional<std::string> sample_id;
    std::vector<std::vector<StageEntry>> candidate_logs;
    std::optional<ConflictVerdict> verdict;
    UsageMeter usage;
    bool failed = false;
};

struct GenerationResult {
    Benchmark benchmark;
    std::vector<SampleLog> logs;
    std::vector<std::string> warnings;
};

class GenerationFailed : public PipelineError {
public:
    GenerationFailed(const std::string& what, std::vector<SampleLog> logs)
        : PipelineError(what), logs_(std::move(logs)) {}
    const std::vector<SampleLog>& logs() const noexcept { return logs_; }

private:
    std::vector<SampleLog> logs_;
};

GenerationResult generate_benchmark(const AssessmentDemand& demand, const Settings& settings, Provider& provider,
                                    const prompts::Library& lib, WorkerPool* pool, Timestamp created_at);

std::string serialize_logs(const std::vector<SampleLog>& logs);

}  // namespace generator
}  // namespace benchgen
