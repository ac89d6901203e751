#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "benchgen/generator.hpp"

// Canned provider responses that drive the generator offline. The script
// follows the pipeline's call order exactly, so a MockProvider loaded with
// it runs to completion without exhausting or leaving responses.
namespace benchgen::demo {

struct ScriptOptions {
    generator::Settings settings;
    int option_count = 10;
    // Mismatch rate of the last sample; earlier samples ramp up linearly from 0.
    double max_beta = 0.8;
    // 0-based sample indices whose every draft attempt is malformed.
    std::set<std::size_t> failing_samples;
};

std::string task_description_response();
std::string attributes_response();
std::string strategies_response();

// Well-formed staged or direct draft. `variant` picks the vocabulary so
// candidates of one sample differ lexically.
std::string draft_response(std::size_t sample, std::size_t variant, std::size_t label, int option_count,
                           generator::Mode mode);
std::string malformed_draft_response();
std::string test_taker_response(std::size_t answer);
std::string comparison_judge_response(std::optional<std::size_t> label, double faithfulness = 1.0);

// Answers for sample `index`: round(max_beta * T * index / (N - 1)) of them
// miss the label, spread over distinct other letters.
std::vector<std::size_t> scripted_answers(std::size_t index, std::size_t label, const ScriptOptions& opts);

std::vector<std::string> build_script(const ScriptOptions& opts);

// Label the script assigns to sample `index`.
std::size_t scripted_label(std::size_t index, int option_count);

}  // namespace benchgen::demo
