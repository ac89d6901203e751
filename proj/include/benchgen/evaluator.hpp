#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "benchgen/core.hpp"
#include "benchgen/prompts.hpp"
#include "benchgen/providers.hpp"
#include "benchgen/stats.hpp"

namespace benchgen {

class WorkerPool;

namespace evaluator {

// Model x sample correctness; cells[m][s] is true when model m answered
// sample s correctly.
struct CorrectnessMatrix {
    std::vector<std::string> model_ids;
    std::vector<std::string> sample_ids;
    std::vector<std::vector<bool>> cells;

    std::size_t model_index(const std::string& id) const;   // throws ValidationError
    std::size_t sample_index(const std::string& id) const;  // throws ValidationError
    // Mean over models of 1 - correct.
    double error_rate(std::size_t sample) const;
    double accuracy(std::size_t model) const;
    std::vector<bool> column(std::size_t sample) const;
};

// One {model_id, sample_id, correct} record per line; models and samples
// keep first-appearance order. Throws FormatError on gaps or duplicates.
CorrectnessMatrix parse_matrix(const std::string& content);
CorrectnessMatrix read_matrix(const std::filesystem::path& path);
std::string serialize_matrix(const CorrectnessMatrix& m);

enum class JudgeCriterion { Faithfulness, Alignment };
std::string to_string(JudgeCriterion c);

struct JudgeRecord {
    std::string sample_id;
    std::string generator_id;
    JudgeCriterion criterion = JudgeCriterion::Faithfulness;
    double score = 0.0;  // 0, 0.5 or 1
    std::size_t rationale_length = 0;
    std::string raw_text;
};

struct ParsedJudgement {
    double score = 0.0;
    std::size_t rationale_length = 0;
};
// Score after the last "Judgement:" marker; nullopt when missing or off the
// 0/0.5/1 scale. rationale_length counts tokens before the marker.
std::optional<ParsedJudgement> parse_judgement(std::string_view response);

std::string faithfulness_prompt(const Sample& s, const prompts::Library& lib);
std::string alignment_prompt(const Sample& s, const AssessmentDemand& demand, const prompts::Library& lib);

JudgeRecord judge_faithfulness(const Sample& s, const std::string& generator_id, Provider& judge,
                               const prompts::Library& lib, int parse_retries = 2);
JudgeRecord judge_alignment(const Sample& s, const AssessmentDemand& demand, const std::string& generator_id,
                            Provider& judge, const prompts::Library& lib, int parse_retries = 2);

// Judges every sample. Calls go out in rounds: all samples, then the ones
// whose answer did not parse, and so on. Throws ParseError when a sample is
// still unparseable after `parse_retries` extra rounds.
std::vector<JudgeRecord> judge_benchmark(const Benchmark& b, JudgeCriterion criterion, Provider& judge,
                                         const prompts::Library& lib, WorkerPool* pool, int parse_retries = 2,
                                         const std::string& generator_id = {});

std::vector<JudgeRecord> parse_judgments(const std::string& content);
std::string serialize_judgments(const std::vector<JudgeRecord>& records);

struct DebiasResult {
    std::map<std::string, double> scores;  // generator id -> debiased score
    std::map<std::string, double> raw_means;
    std::optional<double> length_coefficient;
    std::optional<double> length_p_value;
    bool fallback = false;  // lengths all equal; scores are plain means
};

// score = quality(generator) + b_len * (length - mean length). Needs two or
// more generators with three or more observations each.
DebiasResult debias_observations(const std::vector<std::string>& generator_ids, const std::vector<double>& lengths,
                                 const std::vector<double>& scores);
DebiasResult debias_scores(const std::vector<JudgeRecord>& records);

// Fraction of faithfulness scores equal to 0.
double noise_fraction(const std::vector<JudgeRecord>& records);

struct BiasObservation {
    double difficulty = 0.0;
    double sample_length = 0.0;
    double judge_length = 0.0;
    double score = 0.0;
};

struct BiasCell {
    std::string x;
    std::string y;
    std::optional<stats::CorrelationResult> result;  // nullopt: degenerate input
};

struct BiasScan {
    std::vector<BiasCell> raw;      // every pair of the four columns
    std::vector<BiasCell> partial;  // difficulty and sample_length vs score, controlling judge_length
    const BiasCell& raw_cell(const std::string& x, const std::string& y) const;
    const BiasCell& partial_cell(const std::string& x) const;
};

BiasScan bias_scan(const std::vector<BiasObservation>& observations);

// Word entropy of question plus options over the whole benchmark.
double lexical_diversity(const Benchmark& b, stats::EntropyEstimator estimator = stats::EntropyEstimator::PlugIn);
// Mean pairwise Euclidean distance of question embeddings.
double semantic_diversity(const Benchmark& b, Provider& embedder, WorkerPool* pool);
// Mean pairwise Hamming distance of the per-sample correctness columns,
// restricted to the benchmark's samples.
double knowledge_diversity(const Benchmark& b, const CorrectnessMatrix& m);
double knowledge_diversity(const CorrectnessMatrix& m);

// difficulty_label for every sample, else declared_level for every
// sample; otherwise ValidationError naming the samples lacking a label.
std::vector<double> difficulty_values(const Benchmark& b);
// Mean model error rate per benchmark sample, in benchmark order.
std::vector<double> error_rates(const Benchmark& b, const CorrectnessMatrix& m);

stats::CorrelationResult difficulty_controllability(const Benchmark& b, const CorrectnessMatrix& m);

// Ids of the ceil(fraction * N) samples with the highest difficulty;
// equal difficulties are taken in sample id order.
std::vector<std::string> hardest_subset(const Benchmark& b, double fraction);
double difficulty_boundary(const Benchmark& b, const CorrectnessMatrix& m, double fraction = 0.2);

struct AlignedAccuracies {
    std::vector<std::string> model_ids;
    std::vector<double> first;
    std::vector<double> second;
};
// Row means of both matrices over the models they share, in the first
// matrix's order. Throws ValidationError with fewer than 3 shared models.
AlignedAccuracies align_accuracies(const CorrectnessMatrix& a, const CorrectnessMatrix& b);

stats::CorrelationResult effectiveness(std::span<const double> acc_generated, std::span<const double> acc_reference);
stats::CorrelationResult robustness(std::span<const double> acc_a, std::span<const double> acc_b);

struct Efficiency {
    double dollars_per_item = 0.0;
    double minutes_per_item = 0.0;
};
Efficiency efficiency(const Benchmark& b);

enum class Criterion {
    Faithfulness,
    Alignment,
    Lexical,
    Semantic,
    Knowledge,
    Controllability,
    Boundary,
    Effectiveness,
    Robustness,
    Efficiency,
};
inline constexpr std::size_t kCriterionCount = 10;
const std::vector<Criterion>& all_criteria();
std::string to_string(Criterion c);
// "Credibility", "Diversity", "Difficulty" or "Benchmark-Level".
std::string group_of(Criterion c);

struct CriterionResult {
    Criterion criterion = Criterion::Faithfulness;
    double value = 0.0;
    std::optional<double> p_value;
    std::map<std::string, double> details;
};

struct EvaluationReport {
    std::vector<CriterionResult> results;  // criterion order
    std::map<std::string, std::string> metadata;
    std::vector<std::string> warnings;

    const CriterionResult* find(Criterion c) const;
};

class ReportBuilder {
public:
    // Throws ValidationError when `c` was already added.
    void add(CriterionResult result);
    // Records why a criterion was left out; used in its warning.
    void omit(Criterion c, std::string reason);
    void warn(std::string message);
    void set_metadata(const std::string& key, std::string value);
    // Divides faithfulness and alignment by the given reference scores.
    void rescale_credibility(std::optional<double> faithfulness_reference, std::optional<double> alignment_reference);
    EvaluationReport build() const;

private:
    std::vector<CriterionResult> results_;
    std::map<Criterion, std::string> omitted_;
    std::vector<std::string> warnings_;
    std::map<std::string, std::string> metadata_;
    std::optional<double> faith_ref_;
    std::optional<double> align_ref_;
};

// One summary line keyed by criterion name, one line per criterion, then
// metadata and warnings lines.
std::string serialize_report(const EvaluationReport& r);
// Markdown table with the overall results layout, one row for `method`.
std::string render_markdown(const EvaluationReport& r, const std::string& method);

}  // namespace evaluator
}  // namespace benchgen
