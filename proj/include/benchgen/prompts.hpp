#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace benchgen::prompts {

// Template names; each maps to assets/prompts/<name>.txt.
inline constexpr std::string_view kStagedGenerator = "staged_generator";
inline constexpr std::string_view kDirectGenerator = "direct_generator";
inline constexpr std::string_view kFaithfulnessJudge = "faithfulness_judge";
inline constexpr std::string_view kComparisonJudge = "comparison_judge";
inline constexpr std::string_view kRelevanceJudge = "relevance_judge";
inline constexpr std::string_view kDescribeTask = "describe_task";
inline constexpr std::string_view kAttributes = "attributes";
inline constexpr std::string_view kStrategies = "strategies";
inline constexpr std::string_view kTestTaker = "test_taker";
inline constexpr std::string_view kRewriteDemand = "rewrite_demand";
inline constexpr std::string_view kDifficultyLevels = "difficulty_levels";

using Vars = std::map<std::string, std::string, std::less<>>;

// Substitutes {{name}} placeholders found in `vars` in a single pass.
// Unknown placeholders (the model-facing "{{Your generated question
// content}}" kind) are left as written, and substituted values are never
// rescanned.
std::string render(std::string_view tmpl, const Vars& vars);

class Library {
public:
    // Templates compiled in from assets/prompts.
    static Library builtin();

    // Built-in templates, overridden by any <name>.txt present in `dir`.
    static Library with_overrides(const std::filesystem::path& dir);

    const std::string& get(std::string_view name) const;

    // Description of level 1..10 from the difficulty_levels asset.
    std::string difficulty_level(int level) const;

private:
    std::map<std::string, std::string, std::less<>> templates_;
};

}  // namespace benchgen::prompts
