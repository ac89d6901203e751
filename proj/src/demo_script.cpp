#include "benchgen/demo_script.hpp"

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "benchgen/text.hpp"

namespace benchgen::demo {

namespace {

constexpr std::array<const char*, 48> kWords = {
    "prime",    "integer",  "ratio",    "triangle", "angle",    "circle",   "radius",   "chord",
    "sequence", "series",   "limit",    "vector",   "matrix",   "digit",    "divisor",  "remainder",
    "fraction", "decimal",  "percent",  "median",   "mean",     "variance", "sample",   "dice",
    "coin",     "card",     "graph",    "vertex",   "edge",     "path",     "cycle",    "polygon",
    "area",     "volume",   "slope",    "line",     "parabola", "root",     "factor",   "product",
    "sum",      "exponent", "logarithm", "function", "domain",  "range",    "interval", "bound",
};

std::uint64_t splitmix(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::string words(std::uint64_t& state, int count) {
    std::string out;
    for (int i = 0; i < count; ++i) {
        if (i) out += ' ';
        out += kWords[splitmix(state) % kWords.size()];
    }
    return out;
}

}  // namespace

std::string task_description_response() {
    return "##Task Description:## Assess multi-step mathematical problem solving across school topics.\n"
           "##Query Description:## A self-contained problem statement with all quantities given.\n"
           "##Option Description:## Short numeric or symbolic answers; distractors follow common mistakes.\n";
}

std::string attributes_response() {
    return "Attribute: Topic\n- arithmetic\n- geometry\n- probability\n\n"
           "Attribute: Context\n- abstract\n- everyday scenario\n- scientific setting\n\n"
           "Attribute: Answer form\n- integer\n- fraction\n- expression\n";
}

std::string strategies_response() {
    return "Strategy 1:\n"
           "Required Reasoning Steps set as Single-step\n"
           "Required Reasoning Steps set as Multi-step (2-3 steps)\n"
           "Required Reasoning Steps set as Multi-step (4-6 steps)\n\n"
           "Strategy 2:\n"
           "Familiarity with the Topic is Common\n"
           "Familiarity with the Topic is Uncommon\n"
           "Familiarity with the Topic is Rare\n";
}

std::string draft_response(std::size_t sample, std::size_t variant, std::size_t label, int option_count,
                           generator::Mode mode) {
    std::uint64_t state = sample * 1000003ULL + variant * 7919ULL + 17;
    std::ostringstream os;
    os << "##Analyses:## 1-1. Combine " << words(state, 3) << " into one problem.\n";
    os << "##Question:## Item " << sample + 1 << " asks about the " << words(state, 8 + static_cast<int>(variant))
       << ". Which value is correct?\n";
    if (mode == generator::Mode::Staged)
        os << "##Reasoning Path:## Relate the " << words(state, 4) << " step by step to reach the answer.\n";
    os << "##Candidates:##\n";
    for (int k = 0; k < option_count; ++k)
        os << text::option_letter(static_cast<std::size_t>(k)) << ". " << words(state, 2) << ' ' << k + 1 << '\n';
    os << "##Right Option:##" << text::option_letter(label) << '\n';
    return os.str();
}

std::string malformed_draft_response() {
    return "##Analyses:## I could not produce a sample in the requested format.\n";
}

std::string test_taker_response(std::size_t answer) {
    return "Working through the options one at a time.\nAnswer: " + std::string(1, text::option_letter(answer));
}

std::string comparison_judge_response(std::optional<std::size_t> label, double faithfulness) {
    std::ostringstream os;
    os << "Correctness Analysis: both candidates were checked step by step.\n##Faithfulness:" << faithfulness
       << "##, ##Label:" << (label ? std::string(1, text::option_letter(*label)) : std::string("None")) << "##";
    return os.str();
}

std::size_t scripted_label(std::size_t index, int option_count) {
    return index % static_cast<std::size_t>(option_count);
}

std::vector<std::size_t> scripted_answers(std::size_t index, std::size_t label, const ScriptOptions& opts) {
    const auto t = static_cast<std::size_t>(opts.settings.attempts);
    const auto n = static_cast<std::size_t>(opts.settings.samples);
    const double frac = n > 1 ? double(index) / double(n - 1) : 0.0;
    const auto misses = std::min<std::size_t>(t, static_cast<std::size_t>(std::lround(opts.max_beta * double(t) * frac)));
    std::vector<std::size_t> others;
    for (std::size_t o = 0; o < static_cast<std::size_t>(opts.option_count); ++o) {
        if (o != label) others.push_back(o);
    }
    std::vector<std::size_t> answers(t - misses, label);
    for (std::size_t j = 0; j < misses; ++j) answers.push_back(others[j % others.size()]);
    return answers;
}

std::vector<std::string> build_script(const ScriptOptions& opts) {
    const auto& s = opts.settings;
    const bool staged = s.mode == generator::Mode::Staged;
    std::vector<std::string> script;
    if (s.describe_task) script.push_back(task_description_response());
    if (staged) {
        script.push_back(attributes_response());
        script.push_back(strategies_response());
    }
    const auto per_round = static_cast<std::size_t>(staged ? s.candidates : 1);
    for (std::size_t i = 0; i < static_cast<std::size_t>(s.samples); ++i) {
        if (opts.failing_samples.count(i)) {
            for (std::size_t k = 0; k < per_round * static_cast<std::size_t>(1 + s.max_draft_retries); ++k)
                script.push_back(malformed_draft_response());
            continue;
        }
        const std::size_t label = scripted_label(i, opts.option_count);
        for (std::size_t v = 0; v < per_round; ++v)
            script.push_back(draft_response(i, v, label, opts.option_count, s.mode));
        if (!staged) continue;

        const auto answers = scripted_answers(i, label, opts);
        std::map<std::size_t, std::size_t> votes;
        for (const auto a : answers) {
            script.push_back(test_taker_response(a));
            ++votes[a];
        }
        const std::size_t label_votes = votes.count(label) ? votes.at(label) : 0;
        bool conflict = false;
        for (const auto& [option, c] : votes) conflict |= option != label && c >= label_votes;
        if (conflict) script.push_back(comparison_judge_response(label));
    }
    return script;
}

}  // namespace benchgen::demo
