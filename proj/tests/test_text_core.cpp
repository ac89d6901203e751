#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "benchgen/core.hpp"
#include "benchgen/error.hpp"
#include "benchgen/text.hpp"

using namespace benchgen;

namespace {

Sample two_plus_two() {
    Sample s;
    s.id = "s000001";
    s.question = "2+2?";
    s.options = {"3", "4"};
    s.label = 1;
    s.rationale = "sum";
    return s;
}

Sample ten_option_sample() {
    Sample s;
    s.id = "q1";
    s.question = "Which is prime?";
    s.rationale = "Only 7 has no divisors besides 1 and itself.";
    for (int i = 0; i < 10; ++i) s.options.push_back("option " + std::to_string(i));
    s.label = 1;
    return s;
}

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "benchgen_core_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Text, TokenizeLowercasesAndSplitsPunctuation) {
    EXPECT_EQ(text::tokenize("Hello, World! it's 3.5"),
              (std::vector<std::string>{"hello", "world", "it", "s", "3", "5"}));
    EXPECT_TRUE(text::tokenize("  ...  ").empty());
}

TEST(Text, TokenizeTreatsUnicodePunctuationAsSeparator) {
    EXPECT_EQ(text::tokenize("alpha\xE2\x80\x94" "beta"), (std::vector<std::string>{"alpha", "beta"}));
}

TEST(Text, OptionLetters) {
    EXPECT_EQ(text::option_letter(0), 'A');
    EXPECT_EQ(text::option_letter(25), 'Z');
    EXPECT_EQ(text::letter_index('c'), 2u);
    EXPECT_FALSE(text::letter_index('1').has_value());
}

TEST(Text, CaseInsensitiveFind) {
    EXPECT_EQ(text::find_ci("abc ##QUESTION:", "##question:"), 4u);
    EXPECT_EQ(text::find_ci("abc", "zz"), std::string_view::npos);
    EXPECT_EQ(text::rfind_ci("Answer: A answer: b", "answer:"), 10u);
}

TEST(Validate, WellFormedTenOptionSample) { EXPECT_TRUE(validate_sample(ten_option_sample()).empty()); }

TEST(Validate, LabelOutOfRange) {
    auto s = ten_option_sample();
    s.label = static_cast<std::int64_t>(s.options.size());
    EXPECT_EQ(validate_sample(s), std::vector<std::string>{"label out of range"});
}

TEST(Validate, DuplicateOption) {
    auto s = ten_option_sample();
    s.options[3] = s.options[4];
    EXPECT_EQ(validate_sample(s), std::vector<std::string>{"duplicate option"});
}

TEST(Validate, DifficultyLabelMustBeMultipleOfOneOverT) {
    auto s = ten_option_sample();
    s.difficulty_label = 0.3;
    EXPECT_TRUE(validate_sample(s, 10).empty());
    s.difficulty_label = 0.35;
    EXPECT_FALSE(validate_sample(s, 10).empty());
}

TEST(Convert, FieldProjection) {
    EXPECT_EQ(mcq_to_otg(two_plus_two()), (OpenTextItem{"2+2?", "sum", "4"}));
    auto s = two_plus_two();
    s.label = 0;
    EXPECT_EQ(mcq_to_otg(s).reference_answer, "3");
}

TEST(Convert, InvalidSampleListsViolations) {
    auto s = two_plus_two();
    s.options = {"4", "4"};
    try {
        mcq_to_otg(s);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.violations(), std::vector<std::string>{"duplicate option"});
    }
}

TEST(Benchmark, ThreeLineFileInOrder) {
    const std::string content =
        R"({"id":"a","question":"q1","rationale":"r","options":["x","y"],"label":0,"difficulty_label":null,"declared_level":null,"attributes":{},"strategies":[],"reference_uses":0}
{"id":"b","question":"q2","rationale":"r","options":["x","y"],"label":1,"difficulty_label":0.5,"declared_level":null,"attributes":{"k":"v"},"strategies":["s"],"reference_uses":2}
{"id":"c","question":"q3","rationale":"r","options":["x","y"],"label":0,"difficulty_label":null,"declared_level":4,"attributes":{},"strategies":[],"reference_uses":0}
)";
    const auto b = parse_benchmark(content);
    ASSERT_EQ(b.samples.size(), 3u);
    EXPECT_EQ(b.samples[0].id, "a");
    EXPECT_EQ(b.samples[1].difficulty_label, 0.5);
    EXPECT_EQ(b.samples[2].declared_level, 4);
}

TEST(Benchmark, MissingFieldNamesLine) {
    const std::string content =
        R"({"id":"a","question":"q1","rationale":"r","options":["x","y"],"label":0,"difficulty_label":null,"declared_level":null,"attributes":{},"strategies":[],"reference_uses":0}
{"id":"b","question":"q2","rationale":"r","options":["x","y"],"difficulty_label":null,"declared_level":null,"attributes":{},"strategies":[],"reference_uses":0}
)";
    try {
        parse_benchmark(content);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_STREQ(e.what(), "line 2: missing field label");
    }
}

TEST(Benchmark, DuplicateIdRejected) {
    auto s = two_plus_two();
    Benchmark b;
    b.samples = {s, s};
    EXPECT_THROW(parse_benchmark(serialize_benchmark(b)), FormatError);
}

TEST(Benchmark, RandomizedRoundTrip) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> small(0, 5);
    for (int round = 0; round < 50; ++round) {
        Benchmark b;
        b.demand = {"subset " + std::to_string(round), "demand text\nline two \"quoted\"", 2 + small(rng)};
        b.generator_id = "gen";
        b.created_at = Timestamp{std::chrono::seconds{1700000000 + round}};
        b.usage.prompt_tokens = rng() % 100000;
        b.usage.completion_tokens = rng() % 1000;
        b.usage.dollars = double(rng() % 1000) / 7.0;
        b.usage.wall_seconds = double(rng() % 1000) / 3.0;
        const int n = small(rng);
        for (int i = 0; i < n; ++i) {
            Sample s;
            s.id = sample_id_for(i + 1);
            s.question = "Q é\t" + std::to_string(rng());
            s.rationale = "because\n" + std::to_string(rng());
            const int oc = 2 + small(rng);
            for (int o = 0; o < oc; ++o) s.options.push_back("opt" + std::to_string(o) + "_" + std::to_string(rng() % 97));
            s.label = std::int64_t(rng() % oc);
            if (small(rng) % 2) s.difficulty_label = double(small(rng)) / 5.0;
            if (small(rng) % 2) s.declared_level = 1 + small(rng);
            if (small(rng) % 2) s.attributes["dim"] = "val" + std::to_string(small(rng));
            if (small(rng) % 2) s.strategies = {"tier text"};
            s.reference_uses = small(rng);
            b.samples.push_back(s);
        }
        const auto text = serialize_benchmark(b);
        EXPECT_EQ(parse_benchmark(text), b);
        EXPECT_EQ(serialize_benchmark(parse_benchmark(text)), text);
    }
}

TEST(Benchmark, FileRoundTripIsAtomic) {
    const auto path = temp_file("rt.jsonl");
    Benchmark b;
    b.samples = {two_plus_two()};
    write_benchmark(b, path);
    EXPECT_EQ(read_benchmark(path), b);
    for (const auto& e : std::filesystem::directory_iterator(path.parent_path()))
        EXPECT_EQ(e.path().string().find(".tmp"), std::string::npos) << e.path();
}

TEST(Timestamps, FormatAndParse) {
    const Timestamp t{std::chrono::seconds{86400 * 365 + 3661}};
    EXPECT_EQ(format_utc(t), "1971-01-01T01:01:01Z");
    EXPECT_EQ(parse_utc("1971-01-01T01:01:01Z"), t);
    EXPECT_THROW(parse_utc("yesterday"), FormatError);
}

TEST(Usage, Accumulates) {
    UsageMeter a{10, 2, 1.5, 0.25, false};
    const UsageMeter b{5, 1, 0.5, 0.75, true};
    a += b;
    EXPECT_EQ(a.prompt_tokens, 15u);
    EXPECT_EQ(a.completion_tokens, 3u);
    EXPECT_DOUBLE_EQ(a.wall_seconds, 2.0);
    EXPECT_DOUBLE_EQ(a.dollars, 1.0);
    EXPECT_TRUE(a.estimated);
}

TEST(Render, QuestionWithOptions) {
    EXPECT_EQ(render_question_with_options(two_plus_two()), "2+2?\nA. 3\nB. 4");
}
