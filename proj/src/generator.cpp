#include "benchgen/generator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "benchgen/stats.hpp"
#include "benchgen/text.hpp"
#include "benchgen/worker_pool.hpp"

namespace benchgen {

void Diagnostics::warn(std::string message) {
    spdlog::warn("{}", message);
    warnings_.push_back(std::move(message));
}

namespace generator {

namespace {

struct Marker {
    std::size_t begin = std::string_view::npos;  // start of "##Name:"
    std::size_t content = std::string_view::npos;
};

// Finds "##<name>:" (optionally followed by "##"), case-insensitive.
Marker find_marker(std::string_view s, std::string_view name, std::size_t from = 0) {
    const std::string needle = "##" + std::string(name) + ":";
    Marker m;
    const std::size_t at = text::find_ci(s, needle, from);
    if (at == std::string_view::npos) return m;
    m.begin = at;
    m.content = at + needle.size();
    if (s.substr(m.content, 2) == "##") m.content += 2;
    return m;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

// First A-Z letter standing alone (not inside a word).
std::optional<std::size_t> first_standalone_letter(std::string_view s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c < 'A' || c > 'Z') continue;
        const bool left_ok = i == 0 || !is_word_char(s[i - 1]);
        const bool right_ok = i + 1 == s.size() || !is_word_char(s[i + 1]);
        if (left_ok && right_ok) return static_cast<std::size_t>(c - 'A');
    }
    return std::nullopt;
}

// Parses "A. text" / "(A) text" / "A) text" / "A: text" option lines; lines
// that do not open the next expected letter continue the previous option.
std::vector<std::string> parse_option_lines(std::string_view block) {
    std::vector<std::string> options;
    for (std::string_view raw : text::split_lines(block)) {
        std::string_view line = text::trim(raw);
        if (line.empty()) continue;
        const char expected = text::option_letter(options.size());
        std::string_view rest = line;
        if (!rest.empty() && rest.front() == '(') rest.remove_prefix(1);
        bool opens = false;
        if (rest.size() >= 2 && std::toupper(static_cast<unsigned char>(rest[0])) == expected &&
            (rest[1] == '.' || rest[1] == ')' || rest[1] == ':')) {
            opens = true;
            rest.remove_prefix(2);
        }
        if (opens) {
            options.emplace_back(text::trim(rest));
        } else if (!options.empty()) {
            options.back() += " ";
            options.back() += line;
        }
    }
    return options;
}

std::string strip_braces(std::string_view s) {
    s = text::trim(s);
    while (s.size() >= 2 && s.front() == '{' && s.back() == '}') s = text::trim(s.substr(1, s.size() - 2));
    return std::string(s);
}

// Calls the provider until `parse` yields a value, at most 1 + retries times.
template <typename T, typename Parse>
std::optional<T> ask_until_parsed(Provider& provider, const ChatRequest& req, int retries, Parse&& parse,
                                  std::string& last_raw) {
    for (int attempt = 0; attempt <= retries; ++attempt) {
        last_raw = provider.chat(req).text;
        if (auto v = parse(last_raw)) return v;
    }
    return std::nullopt;
}

UsageMeter usage_delta(const UsageMeter& after, const UsageMeter& before) {
    UsageMeter d;
    d.prompt_tokens = after.prompt_tokens - before.prompt_tokens;
    d.completion_tokens = after.completion_tokens - before.completion_tokens;
    d.wall_seconds = after.wall_seconds - before.wall_seconds;
    d.dollars = after.dollars - before.dollars;
    d.estimated = after.estimated;
    return d;
}

std::string render_demonstrations(const std::vector<Sample>& refs) {
    std::string out;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (i) out += "\n\n";
        out += "Sample " + std::to_string(i + 1) + ":\n" + render_question_with_options(refs[i]);
    }
    return out;
}

}  // namespace

void Settings::validate() const {
    std::vector<std::string> v;
    if (samples < 1) v.emplace_back("samples must be >= 1");
    if (attempts < 1) v.emplace_back("attempts must be >= 1");
    if (references < 1) v.emplace_back("references must be >= 1");
    if (candidates < 1) v.emplace_back("candidates must be >= 1");
    if (max_draft_retries < 0) v.emplace_back("max_draft_retries must be >= 0");
    if (parse_retries < 0) v.emplace_back("parse_retries must be >= 0");
    if (temperature < 0.0) v.emplace_back("temperature must be >= 0");
    if (max_failure_fraction < 0.0 || max_failure_fraction > 1.0)
        v.emplace_back("max_failure_fraction must be in [0,1]");
    if (!v.empty()) {
        std::string msg = "invalid generator settings:";
        for (const auto& e : v) msg += " " + e + ";";
        throw ValidationError(msg, v);
    }
}

std::size_t AttributeSet::value_count() const {
    std::size_t n = 0;
    for (const auto& [_, values] : dimensions) n += values.size();
    return n;
}

std::optional<TaskDescriptions> parse_task_descriptions(std::string_view response) {
    const Marker task = find_marker(response, "Task Description");
    const Marker query = find_marker(response, "Query Description");
    const Marker option = find_marker(response, "Option Description");
    if (task.begin == std::string_view::npos || query.begin == std::string_view::npos ||
        option.begin == std::string_view::npos)
        return std::nullopt;
    if (!(task.begin < query.begin && query.begin < option.begin)) return std::nullopt;
    TaskDescriptions d;
    d.task = strip_braces(response.substr(task.content, query.begin - task.content));
    d.query = strip_braces(response.substr(query.content, option.begin - query.content));
    d.option = strip_braces(response.substr(option.content));
    if (d.task.empty() || d.query.empty() || d.option.empty()) return std::nullopt;
    return d;
}

AttributeSet parse_attributes(std::string_view response, Diagnostics& diag) {
    AttributeSet set;
    std::optional<std::pair<std::string, std::vector<std::string>>> current;
    auto flush = [&] {
        if (!current) return;
        if (current->second.size() >= 2) {
            set.dimensions.push_back(std::move(*current));
        } else {
            diag.warn("attribute '" + current->first + "' has fewer than 2 values; dropped");
        }
        current.reset();
    };
    for (std::string_view raw : text::split_lines(response)) {
        const std::string_view line = text::trim(raw);
        if (line.empty()) continue;
        if (text::find_ci(line, "attribute:") == 0) {
            flush();
            const std::string name = strip_braces(line.substr(10));
            if (!name.empty()) current.emplace(name, std::vector<std::string>{});
            continue;
        }
        if (current && (line.front() == '-' || line.front() == '*')) {
            const std::string value = strip_braces(line.substr(1));
            if (!value.empty() &&
                std::find(current->second.begin(), current->second.end(), value) == current->second.end())
                current->second.push_back(value);
        }
    }
    flush();
    return set;
}

StrategySet parse_strategies(std::string_view response, Diagnostics& diag) {
    StrategySet set;
    std::optional<Strategy> current;
    auto flush = [&] {
        if (!current) return;
        if (current->tiers.size() >= 2) {
            set.strategies.push_back(std::move(*current));
        } else {
            diag.warn(current->name + " has fewer than 2 tiers; skipped");
        }
        current.reset();
    };
    for (std::string_view raw : text::split_lines(response)) {
        const std::string_view line = text::trim(raw);
        if (line.empty()) {
            flush();
            continue;
        }
        if (text::find_ci(line, "strategy") == 0 && line.back() == ':') {
            flush();
            current = Strategy{std::string(line.substr(0, line.size() - 1)), {}};
            continue;
        }
        if (current) {
            std::string_view tier = line;
            if (tier.front() == '-' || tier.front() == '*') tier = text::trim(tier.substr(1));
            current->tiers.emplace_back(tier);
        } else {
            diag.warn("strategy text outside a 'Strategy N:' block ignored: " + std::string(line));
        }
    }
    flush();
    return set;
}

ParsedDraft parse_draft(std::string_view response, int option_count, Mode mode) {
    ParsedDraft out;
    auto pass = [&](const char* stage) { out.stages.push_back({stage, true, 0, {}}); };
    auto fail = [&](const char* stage, std::string detail) {
        out.stages.push_back({stage, false, 0, std::move(detail)});
        return out;
    };

    const Marker analyses = find_marker(response, "Analyses");
    if (analyses.begin == std::string_view::npos) return fail("analyses", "analyses missing");
    pass("analyses");

    const Marker question = find_marker(response, "Question", analyses.content);
    if (question.begin == std::string_view::npos) return fail("question", "question missing");

    Marker reasoning;
    std::size_t after_question = question.content;
    if (mode == Mode::Staged) {
        reasoning = find_marker(response, "Reasoning Path", question.content);
        if (reasoning.begin != std::string_view::npos) after_question = reasoning.begin;
    }
    const Marker candidates = find_marker(response, "Candidates", after_question);
    const Marker right = find_marker(response, "Right Option",
                                     candidates.begin == std::string_view::npos ? after_question : candidates.content);

    const std::size_t question_end = mode == Mode::Staged && reasoning.begin != std::string_view::npos
                                         ? reasoning.begin
                                         : (candidates.begin != std::string_view::npos ? candidates.begin
                                                                                       : right.begin);
    const std::string q = strip_braces(response.substr(question.content, question_end == std::string_view::npos
                                                                             ? std::string_view::npos
                                                                             : question_end - question.content));
    if (q.empty()) return fail("question", "empty question");
    pass("question");

    std::string rationale;
    if (mode == Mode::Staged) {
        if (reasoning.begin == std::string_view::npos) return fail("reasoning", "reasoning path missing");
        const std::size_t end = candidates.begin != std::string_view::npos ? candidates.begin : right.begin;
        rationale = strip_braces(response.substr(
            reasoning.content, end == std::string_view::npos ? std::string_view::npos : end - reasoning.content));
        if (rationale.empty()) return fail("reasoning", "empty reasoning path");
        pass("reasoning");
    } else {
        rationale = strip_braces(response.substr(analyses.content, question.begin - analyses.content));
    }

    if (candidates.begin == std::string_view::npos) return fail("candidates", "candidates missing");
    const std::size_t cand_end = right.begin == std::string_view::npos ? std::string_view::npos
                                                                        : right.begin - candidates.content;
    const auto options = parse_option_lines(response.substr(candidates.content, cand_end));
    if (static_cast<int>(options.size()) != option_count)
        return fail("candidates", "expected " + std::to_string(option_count) + " candidates, got " +
                                      std::to_string(options.size()));
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (options[i].empty()) return fail("candidates", "empty candidate");
        for (std::size_t j = 0; j < i; ++j) {
            if (options[i] == options[j]) return fail("candidates", "duplicate candidate");
        }
    }
    pass("candidates");

    if (right.begin == std::string_view::npos) return fail("right_option", "right option missing");
    std::string_view right_text = text::trim(response.substr(right.content));
    const auto line_end = right_text.find('\n');
    if (line_end != std::string_view::npos) right_text = right_text.substr(0, line_end);
    const auto letter = first_standalone_letter(right_text);
    if (!letter) return fail("right_option", "right option missing");
    if (*letter >= options.size())
        return fail("right_option", "right option out of range: " + std::string(text::trim(right_text)));
    pass("right_option");

    Sample s;
    s.question = q;
    s.rationale = rationale;
    s.options = options;
    s.label = static_cast<std::int64_t>(*letter);
    out.sample = std::move(s);
    return out;
}

std::optional<std::size_t> extract_answer(std::string_view response, std::size_t option_count) {
    const std::size_t at = text::rfind_ci(response, "answer:");
    if (at == std::string_view::npos) return std::nullopt;
    std::string_view rest = response.substr(at + 7);
    const auto nl = rest.find('\n');
    if (nl != std::string_view::npos) rest = rest.substr(0, nl);
    const auto letter = first_standalone_letter(rest);
    if (!letter || *letter >= option_count) return std::nullopt;
    return letter;
}

std::optional<JudgeChoice> parse_comparison_judgement(std::string_view response, std::size_t option_count) {
    const std::size_t f = text::rfind_ci(response, "faithfulness:");
    const std::size_t l = text::rfind_ci(response, "label:");
    if (f == std::string_view::npos || l == std::string_view::npos) return std::nullopt;

    JudgeChoice choice;
    std::string_view score = response.substr(f + 13);
    score = score.substr(0, score.find_first_of("#,\n"));
    const std::string score_text = strip_braces(score);
    try {
        std::size_t used = 0;
        choice.faithfulness = std::stod(score_text, &used);
        if (used != score_text.size() || !std::isfinite(choice.faithfulness)) return std::nullopt;
    } catch (const std::exception&) {
        return std::nullopt;
    }

    std::string_view label = response.substr(l + 6);
    label = label.substr(0, label.find_first_of("#,\n"));
    const std::string label_text = strip_braces(label);
    if (text::find_ci(label_text, "none") == 0) return choice;
    const auto letter = first_standalone_letter(label_text);
    if (!letter || *letter >= option_count) return std::nullopt;
    choice.label = letter;
    return choice;
}

std::string build_draft_prompt(const DraftRequest& req, const prompts::Library& lib) {
    prompts::Vars vars;
    vars["OptionNum"] = std::to_string(req.demand.option_count);
    vars["query define"] = req.descriptions.query;
    vars["option define"] = req.descriptions.option;
    if (req.mode == Mode::Direct) {
        std::string task = req.descriptions.task;
        if (req.level) task += "\n\nDifficulty: " + lib.difficulty_level(*req.level);
        vars["task define"] = task;
        return prompts::render(lib.get(prompts::kDirectGenerator), vars);
    }
    vars["original task"] = req.demand.text;
    vars["task define"] = req.descriptions.task;
    std::string attrs;
    for (const auto& [name, value] : req.attributes) attrs += "- " + name + ": " + value + "\n";
    vars["attribute define"] = attrs;
    std::string tiers;
    for (const auto& t : req.strategy_tiers) tiers += "- " + t + "\n";
    vars["difficulty attribute define"] = tiers;
    vars["demonstrations"] = render_demonstrations(req.references);
    std::string demo;
    for (int i = 0; i < req.demand.option_count; ++i) {
        if (i) demo += "\n";
        const char letter = text::option_letter(static_cast<std::size_t>(i));
        demo += std::string(1, letter) + ". {{option " + std::string(1, letter) + "}}";
    }
    vars["CandidatesDemo"] = demo;
    return prompts::render(lib.get(prompts::kStagedGenerator), vars);
}

std::string build_test_taker_prompt(const Sample& s, const prompts::Library& lib) {
    return prompts::render(lib.get(prompts::kTestTaker), {{"question", s.question}, {"options", render_options(s.options)}});
}

TaskDescriptions describe_task(const AssessmentDemand& demand, Provider& provider, const prompts::Library& lib,
                               int parse_retries, Diagnostics& diag) {
    const auto req = ChatRequest::user(prompts::render(
        lib.get(prompts::kDescribeTask), {{"demand", demand.text}, {"OptionNum", std::to_string(demand.option_count)}}));
    std::string raw;
    auto parsed = ask_until_parsed<TaskDescriptions>(provider, req, parse_retries, parse_task_descriptions, raw);
    if (parsed) return *parsed;
    diag.warn("task descriptions unparseable; falling back to the demand text");
    return TaskDescriptions{demand.text, "A question that assesses the abilities described in the task.",
                            std::to_string(demand.option_count) +
                                " candidate options, exactly one of which is correct; the others are plausible "
                                "distractors."};
}

AttributeSet generate_attributes(const AssessmentDemand& demand, Provider& provider, const prompts::Library& lib,
                                 int parse_retries, Diagnostics& diag) {
    const auto req = ChatRequest::user(prompts::render(lib.get(prompts::kAttributes), {{"demand", demand.text}}));
    std::string raw;
    auto parsed = ask_until_parsed<AttributeSet>(
        provider, req, parse_retries,
        [&](std::string_view r) -> std::optional<AttributeSet> {
            auto set = parse_attributes(r, diag);
            if (set.dimensions.empty()) return std::nullopt;
            return set;
        },
        raw);
    if (!parsed) throw ParseError("no usable attributes after " + std::to_string(parse_retries + 1) + " attempts", raw);
    return *parsed;
}

StrategySet generate_strategies(const AssessmentDemand& demand, Provider& provider, const prompts::Library& lib,
                                int parse_retries, Diagnostics& diag) {
    const auto req = ChatRequest::user(prompts::render(lib.get(prompts::kStrategies), {{"demand", demand.text}}));
    std::string raw;
    auto parsed = ask_until_parsed<StrategySet>(
        provider, req, parse_retries,
        [&](std::string_view r) -> std::optional<StrategySet> {
            auto set = parse_strategies(r, diag);
            if (set.strategies.empty()) return std::nullopt;
            return set;
        },
        raw);
    if (!parsed) throw ParseError("no usable strategies after " + std::to_string(parse_retries + 1) + " attempts", raw);
    return *parsed;
}

DraftOutcome draft_sample(const DraftRequest& req, Provider& provider, const prompts::Library& lib,
                          int max_draft_retries) {
    const auto chat_req = ChatRequest::user(build_draft_prompt(req, lib), req.temperature);
    std::vector<StageEntry> log;
    for (int attempt = 0; attempt <= max_draft_retries; ++attempt) {
        auto parsed = parse_draft(provider.chat(chat_req).text, req.demand.option_count, req.mode);
        for (auto& e : parsed.stages) {
            e.attempt = attempt;
            log.push_back(e);
        }
        if (parsed.sample) return DraftOutcome{std::move(*parsed.sample), std::move(log)};
    }
    throw DraftFailure("draft failed after " + std::to_string(max_draft_retries + 1) + " attempts", std::move(log));
}

CandidateBatch draft_candidates(const DraftRequest& req, int count, Provider& provider, const prompts::Library& lib,
                                int max_draft_retries, WorkerPool* pool) {
    const auto chat_req = ChatRequest::user(build_draft_prompt(req, lib), req.temperature);
    const auto n = static_cast<std::size_t>(count);
    std::vector<std::optional<Sample>> slots(n);
    CandidateBatch batch;
    batch.slot_logs.resize(n);
    std::vector<std::size_t> pending(n);
    std::iota(pending.begin(), pending.end(), 0);

    for (int attempt = 0; attempt <= max_draft_retries && !pending.empty(); ++attempt) {
        const std::vector<ChatRequest> reqs(pending.size(), chat_req);
        const auto replies = provider.chat_batch(reqs, pool);
        std::vector<std::size_t> still;
        for (std::size_t k = 0; k < pending.size(); ++k) {
            const std::size_t slot = pending[k];
            auto parsed = parse_draft(replies[k].text, req.demand.option_count, req.mode);
            for (auto& e : parsed.stages) {
                e.attempt = attempt;
                batch.slot_logs[slot].push_back(e);
            }
            if (parsed.sample) {
                slots[slot] = std::move(parsed.sample);
            } else {
                still.push_back(slot);
            }
        }
        pending = std::move(still);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i]) batch.drafted.push_back(DraftOutcome{std::move(*slots[i]), batch.slot_logs[i]});
    }
    return batch;
}

double mismatch_fraction(const std::vector<std::optional<std::size_t>>& answers, std::size_t label) {
    if (answers.empty()) return 0.0;
    std::size_t mismatches = 0;
    for (const auto& a : answers) mismatches += !a || *a != label;
    return double(mismatches) / double(answers.size());
}

DifficultyEstimate estimate_difficulty(const Sample& s, Provider& provider, const prompts::Library& lib,
                                       int attempts, double temperature, WorkerPool* pool, Diagnostics& diag) {
    if (attempts < 1) throw ValidationError("attempt count must be >= 1");
    if (auto v = validate_sample(s); !v.empty()) throw ValidationError("estimate_difficulty: invalid sample", v);
    const auto req = ChatRequest::user(build_test_taker_prompt(s, lib), temperature);
    const std::vector<ChatRequest> reqs(static_cast<std::size_t>(attempts), req);
    const auto replies = provider.chat_batch(reqs, pool);

    DifficultyEstimate est;
    for (std::size_t j = 0; j < replies.size(); ++j) {
        auto answer = extract_answer(replies[j].text, s.options.size());
        if (!answer) {
            ++est.unparseable;
            diag.warn("test-taker attempt " + std::to_string(j + 1) + " on '" + s.id +
                      "' has no parseable answer; counted as a mismatch");
        }
        est.answers.push_back(answer);
        est.responses.push_back(replies[j].text);
    }
    est.beta = mismatch_fraction(est.answers, static_cast<std::size_t>(s.label));
    return est;
}

ConflictVerdict resolve_conflict(const Sample& s, const DifficultyEstimate& estimate, Provider& provider,
                                 const prompts::Library& lib, int parse_retries, Diagnostics& diag) {
    const auto label = static_cast<std::size_t>(s.label);
    ConflictVerdict v;
    v.final_label = label;
    v.final_rationale = s.rationale;
    for (const auto& a : estimate.answers) {
        if (a) {
            ++v.vote_counts[*a];
        } else {
            ++v.unparseable;
        }
    }
    if (v.vote_counts.empty()) return v;

    std::size_t best = 0;
    for (const auto& [_, c] : v.vote_counts) best = std::max(best, c);
    // Ties with the label count as conflicts: prefer a tied non-label option.
    std::optional<std::size_t> voted;
    for (const auto& [option, c] : v.vote_counts) {
        if (c == best && option != label) {
            voted = option;
            break;
        }
    }
    v.voted_answer = voted ? voted : std::optional<std::size_t>(label);
    if (!voted) return v;

    std::string voted_rationale;
    for (std::size_t j = 0; j < estimate.answers.size(); ++j) {
        if (estimate.answers[j] == voted) {
            voted_rationale = estimate.responses[j];
            break;
        }
    }
    const std::string original = s.rationale + "\nAnswer: " + std::string(1, text::option_letter(label));
    const auto req = ChatRequest::user(prompts::render(
        lib.get(prompts::kComparisonJudge),
        {{"question", render_question_with_options(s)}, {"can1", original}, {"can2", voted_rationale}}));

    std::string raw;
    auto choice = ask_until_parsed<JudgeChoice>(
        provider, req, parse_retries,
        [&](std::string_view r) -> std::optional<JudgeChoice> {
            auto c = parse_comparison_judgement(r, s.options.size());
            if (c && c->label && *c->label != label && *c->label != *voted) return std::nullopt;
            return c;
        },
        raw);
    if (!choice) {
        diag.warn("contrastive judge unparseable for '" + s.id + "'; keeping the original label");
        return v;
    }
    v.resolved_by = Resolution::ContrastiveJudge;
    v.judge_faithfulness = choice->faithfulness;
    if (!choice->label) {
        diag.warn("contrastive judge found no correct option for '" + s.id + "'; keeping the original label");
        return v;
    }
    v.final_label = *choice->label;
    v.final_rationale = *choice->label == label ? s.rationale : voted_rationale;
    return v;
}

double calibrated_difficulty(double beta, std::int64_t uses, int references) {
    return beta * std::pow(0.9, double(uses) / double(references));
}

std::vector<Sample> select_references(std::vector<Sample>& pool, int references, std::mt19937_64& rng) {
    if (references < 1) throw ValidationError("reference count must be >= 1");
    if (pool.empty()) return {};
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> score(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i)
        score[i] = calibrated_difficulty(pool[i].difficulty_label.value_or(0.0), pool[i].reference_uses, references);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

    const std::size_t cand = std::min<std::size_t>(2 * static_cast<std::size_t>(references), pool.size());
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(references), cand);
    std::vector<std::size_t> chosen;
    chosen.reserve(take);
    std::sample(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cand), std::back_inserter(chosen),
                static_cast<std::ptrdiff_t>(take), rng);
    std::shuffle(chosen.begin(), chosen.end(), rng);

    std::vector<Sample> out;
    out.reserve(take);
    for (const std::size_t idx : chosen) {
        ++pool[idx].reference_uses;
        out.push_back(pool[idx]);
    }
    return out;
}

std::string lexical_text(const Sample& s) {
    std::string t = s.question;
    for (const auto& o : s.options) t += "\n" + o;
    return t;
}

std::vector<double> diversity_scores(std::span<const std::string> candidates,
                                     std::span<const std::string> references) {
    const double base = references.empty() ? 0.0 : stats::word_entropy(references);
    std::vector<std::string> corpus(references.begin(), references.end());
    std::vector<double> scores;
    scores.reserve(candidates.size());
    for (const auto& c : candidates) {
        corpus.push_back(c);
        double h = 0.0;
        try {
            h = stats::word_entropy(corpus);
        } catch (const ValidationError&) {
            h = 0.0;  // candidate and references carry no tokens
        }
        scores.push_back(h - base);
        corpus.pop_back();
    }
    return scores;
}

std::size_t boost_diversity(std::span<const std::string> candidates, std::span<const std::string> references) {
    if (candidates.empty()) throw ValidationError("boost_diversity needs at least one candidate");
    const auto scores = diversity_scores(candidates, references);
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    return best;
}

std::size_t boost_diversity(const std::vector<Sample>& candidates, const std::vector<Sample>& references) {
    std::vector<std::string> c, r;
    for (const auto& s : candidates) c.push_back(lexical_text(s));
    for (const auto& s : references) r.push_back(lexical_text(s));
    return boost_diversity(c, r);
}

std::size_t tier_for(std::size_t index, std::size_t total, std::size_t tiers) {
    if (tiers == 0 || total == 0) return 0;
    return std::min(tiers - 1, index * tiers / total);
}

GenerationResult generate_benchmark(const AssessmentDemand& demand, const Settings& settings, Provider& provider,
                                    const prompts::Library& lib, WorkerPool* pool, Timestamp created_at) {
    settings.validate();
    if (text::trim(demand.text).empty()) throw ValidationError("assessment demand text is empty");
    if (demand.option_count < 2 || demand.option_count > 26) throw ValidationError("option_count must be in [2,26]");

    Diagnostics diag;
    std::mt19937_64 rng(settings.seed);
    const UsageMeter start_usage = provider.usage();
    const auto n = static_cast<std::size_t>(settings.samples);

    TaskDescriptions desc{demand.text, demand.text, demand.text};
    if (settings.describe_task) desc = describe_task(demand, provider, lib, settings.parse_retries, diag);

    AttributeSet attrs;
    StrategySet strategies;
    if (settings.mode == Mode::Staged) {
        attrs = generate_attributes(demand, provider, lib, settings.parse_retries, diag);
        strategies = generate_strategies(demand, provider, lib, settings.parse_retries, diag);
    }

    GenerationResult result;
    std::vector<Sample>& out = result.benchmark.samples;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < n; ++i) {
        SampleLog log;
        log.index = i;
        const UsageMeter before = provider.usage();

        DraftRequest req;
        req.demand = demand;
        req.descriptions = desc;
        req.mode = settings.mode;
        req.temperature = settings.temperature;
        if (settings.mode == Mode::Direct) {
            req.level = static_cast<int>(std::min<std::size_t>(10, 1 + i * 10 / n));
        } else {
            for (const auto& [name, values] : attrs.dimensions) {
                std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
                req.attributes[name] = values[pick(rng)];
            }
            for (const auto& st : strategies.strategies)
                req.strategy_tiers.push_back(st.tiers[tier_for(i, n, st.tiers.size())]);
            req.references = select_references(out, settings.references, rng);
        }

        const int count = settings.mode == Mode::Staged ? settings.candidates : 1;
        auto batch = draft_candidates(req, count, provider, lib, settings.max_draft_retries, pool);
        log.candidate_logs = batch.slot_logs;
        if (batch.drafted.empty()) {
            ++failures;
            log.failed = true;
            log.usage = usage_delta(provider.usage(), before);
            diag.warn("sample " + std::to_string(i + 1) + ": every candidate failed drafting; skipped");
            result.logs.push_back(std::move(log));
            if (double(failures) > settings.max_failure_fraction * double(n) + 1e-9) {
                throw GenerationFailed(std::to_string(failures) + " of " + std::to_string(n) +
                                           " samples failed drafting (limit " +
                                           std::to_string(settings.max_failure_fraction * 100.0) + "%)",
                                       std::move(result.logs));
            }
            continue;
        }

        std::vector<Sample> drafted;
        for (auto& d : batch.drafted) drafted.push_back(std::move(d.sample));
        Sample sample = std::move(drafted[boost_diversity(drafted, req.references)]);
        sample.id = sample_id_for(out.size() + 1);
        sample.attributes = req.attributes;
        sample.strategies = req.strategy_tiers;
        sample.reference_uses = 0;
        if (settings.mode == Mode::Direct) sample.declared_level = req.level;

        if (settings.mode == Mode::Staged) {
            const auto est = estimate_difficulty(sample, provider, lib, settings.attempts, settings.temperature,
                                                 pool, diag);
            auto verdict = resolve_conflict(sample, est, provider, lib, settings.parse_retries, diag);
            sample.label = static_cast<std::int64_t>(verdict.final_label);
            sample.rationale = verdict.final_rationale;
            sample.difficulty_label = mismatch_fraction(est.answers, verdict.final_label);
            log.verdict = std::move(verdict);
        }

        log.sample_id = sample.id;
        log.usage = usage_delta(provider.usage(), before);
        result.logs.push_back(std::move(log));
        out.push_back(std::move(sample));
    }

    result.benchmark.demand = demand;
    result.benchmark.generator_id = settings.generator_id;
    result.benchmark.created_at = created_at;
    result.benchmark.usage = usage_delta(provider.usage(), start_usage);
    result.warnings = diag.warnings();
    return result;
}

std::string serialize_logs(const std::vector<SampleLog>& logs) {
    using ordered_json = nlohmann::ordered_json;
    std::string out;
    for (const auto& log : logs) {
        ordered_json j;
        j["index"] = log.index;
        j["sample_id"] = log.sample_id ? ordered_json(*log.sample_id) : ordered_json(nullptr);
        j["failed"] = log.failed;
        j["candidates"] = ordered_json::array();
        for (const auto& slot : log.candidate_logs) {
            ordered_json entries = ordered_json::array();
            for (const auto& e : slot)
                entries.push_back({{"stage", e.stage}, {"passed", e.passed}, {"attempt", e.attempt}, {"detail", e.detail}});
            j["candidates"].push_back(entries);
        }
        if (log.verdict) {
            const auto& v = *log.verdict;
            ordered_json votes = ordered_json::object();
            for (const auto& [opt, c] : v.vote_counts) votes[std::string(1, text::option_letter(opt))] = c;
            j["verdict"] = {{"voted_answer", v.voted_answer ? ordered_json(std::string(1, text::option_letter(*v.voted_answer)))
                                                            : ordered_json(nullptr)},
                            {"votes", votes},
                            {"unparseable", v.unparseable},
                            {"final_label", std::string(1, text::option_letter(v.final_label))},
                            {"resolved_by", v.resolved_by == Resolution::NoConflict ? "no-conflict" : "contrastive-judge"}};
        }
        j["usage"] = {{"prompt_tokens", log.usage.prompt_tokens},
                      {"completion_tokens", log.usage.completion_tokens},
                      {"wall_seconds", log.usage.wall_seconds},
                      {"dollars", log.usage.dollars}};
        out += j.dump() + "\n";
    }
    return out;
}

}  // namespace generator
}  // namespace benchgen
