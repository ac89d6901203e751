#include "benchgen/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "benchgen/config.hpp"
#include "benchgen/demo_script.hpp"
#include "benchgen/error.hpp"
#include "benchgen/evaluator.hpp"
#include "benchgen/generator.hpp"
#include "benchgen/prompts.hpp"
#include "benchgen/reliability.hpp"
#include "benchgen/text.hpp"
#include "benchgen/worker_pool.hpp"

namespace benchgen::cli {

namespace fs = std::filesystem;
namespace ev = evaluator;

namespace {

// Usage-level failure detected by a command body.
class UsageError : public Error {
public:
    using Error::Error;
};

std::string num(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

RunConfig config_from(const std::string& path) { return path.empty() ? RunConfig{} : load_config(path); }

prompts::Library library_for(const RunConfig& cfg) {
    return cfg.assets_dir.empty() ? prompts::Library::builtin() : prompts::Library::with_overrides(cfg.assets_dir);
}

fs::path resolve_under(const fs::path& dir, const std::string& p) {
    const fs::path path(p);
    if (path.is_absolute() || dir.empty()) return path;
    return dir / path;
}

fs::path find_demand_file(const RunConfig& cfg, const std::string& p) {
    if (fs::exists(p)) return p;
    const auto alt = resolve_under(cfg.demands_dir, p);
    if (!cfg.demands_dir.empty() && fs::exists(alt)) return alt;
    throw UsageError("demand file not found: " + p);
}

AssessmentDemand pick_demand(const fs::path& file, const std::string& subset) {
    const auto demands = parse_demands(read_file(file), file.stem().string());
    if (!subset.empty()) {
        for (const auto& d : demands) {
            if (d.name == subset) return d;
        }
        throw UsageError("subset '" + subset + "' not found in " + file.string());
    }
    if (demands.size() > 1) {
        std::string names;
        for (const auto& d : demands) names += "\n  " + d.name;
        throw UsageError("demand file holds " + std::to_string(demands.size()) + " subsets; choose one with --subset:" +
                         names);
    }
    return demands.front();
}

void require_file(const std::string& path, const std::string& what) {
    if (!fs::exists(path)) throw UsageError(what + " not found: " + path);
}

// ---- generate -----------------------------------------------------------

struct GenerateArgs {
    std::string demand, out, config, subset, mode;
    int n = 0;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers, attempts, references, candidates, options;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig cfg = config_from(a.config);
    const auto demand_file = find_demand_file(cfg, a.demand);
    if (a.n < 1) throw UsageError("--n must be at least 1");
    auto& s = cfg.generator;
    s.samples = a.n;
    if (a.seed) {
        s.seed = *a.seed;
        cfg.seed_given = true;
    }
    if (!cfg.seed_given) throw UsageError("a seed is required: pass --seed or set generator.seed in the config");
    if (a.attempts) s.attempts = *a.attempts;
    if (a.references) s.references = *a.references;
    if (a.candidates) s.candidates = *a.candidates;
    if (a.options) cfg.option_count = *a.options;
    if (a.workers) cfg.workers = *a.workers;
    if (!a.mode.empty()) s.mode = a.mode == "direct" ? generator::Mode::Direct : generator::Mode::Staged;
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }

    AssessmentDemand demand = pick_demand(demand_file, a.subset);
    demand.option_count = cfg.option_count;
    const auto provider = make_provider(cfg.provider(cfg.generator_provider, "generator"));
    const auto lib = library_for(cfg);
    WorkerPool pool(static_cast<std::size_t>(cfg.workers));

    const fs::path out_path = resolve_under(cfg.output_dir, a.out);
    const fs::path log_path = out_path.string() + ".log.jsonl";
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());

    generator::GenerationResult result;
    try {
        result = generator::generate_benchmark(demand, s, *provider, lib, &pool, creation_time(*provider));
    } catch (const generator::GenerationFailed& e) {
        write_file_atomic(log_path, generator::serialize_logs(e.logs()));
        err << "generation failed: " << e.what() << "\nstage log: " << log_path.string() << "\n";
        return kExitRuntime;
    }
    write_benchmark(result.benchmark, out_path);
    write_file_atomic(log_path, generator::serialize_logs(result.logs));

    const auto& b = result.benchmark;
    out << "wrote " << b.samples.size() << " samples to " << out_path.string() << "\n";
    if (!b.samples.empty()) {
        const double n = double(b.samples.size());
        out << "per item: $" << num(b.usage.dollars / n) << ", " << num(b.usage.wall_seconds / 60.0 / n, 3)
            << " min" << (b.usage.estimated ? " (token counts estimated)" : "") << "\n";
        std::map<std::string, std::size_t> hist;
        double sum = 0.0;
        for (const auto& smp : b.samples) {
            const double v = smp.difficulty_label ? *smp.difficulty_label : double(smp.declared_level.value_or(0));
            sum += v;
            ++hist[smp.difficulty_label ? num(v, 2) : std::to_string(smp.declared_level.value_or(0))];
        }
        out << (s.mode == generator::Mode::Staged ? "difficulty label" : "declared level") << ": mean "
            << num(sum / n, 3) << "; counts";
        for (const auto& [k, c] : hist) out << " " << k << ":" << c;
        out << "\n";
    }
    const std::size_t failed = std::count_if(result.logs.begin(), result.logs.end(),
                                             [](const generator::SampleLog& l) { return l.failed; });
    if (failed) out << "skipped " << failed << " samples after repeated draft failures\n";
    out << "warnings: " << result.warnings.size() << "\nstage log: " << log_path.string() << "\n";
    return kExitOk;
}

// ---- evaluate -----------------------------------------------------------

struct EvaluateArgs {
    std::string bench, reference, matrix, reference_matrix, robust_matrix, config, out;
    bool judge = false;
    std::optional<double> fraction;
    std::optional<int> workers;
};

struct CredibilityScores {
    double value = 0.0;
    std::optional<double> reference;
    std::map<std::string, double> details;
};

CredibilityScores credibility(const std::vector<ev::JudgeRecord>& records, const std::string& gen,
                              const std::optional<std::string>& ref_gen, ev::ReportBuilder& rb,
                              const std::string& name) {
    CredibilityScores out;
    std::set<std::string> gens;
    double own_sum = 0.0;
    std::size_t own_n = 0;
    for (const auto& r : records) {
        gens.insert(r.generator_id);
        if (r.generator_id == gen) {
            own_sum += r.score;
            ++own_n;
        }
    }
    out.details["raw_mean"] = own_n ? own_sum / double(own_n) : 0.0;
    if (gens.size() < 2) {
        rb.warn(name + ": only one generator judged; reporting the mean score without length debiasing");
        out.value = out.details["raw_mean"];
        return out;
    }
    const auto d = ev::debias_scores(records);
    out.value = d.scores.at(gen);
    if (ref_gen) out.reference = d.scores.at(*ref_gen);
    if (d.length_coefficient) out.details["length_coefficient"] = *d.length_coefficient;
    if (d.length_p_value) out.details["length_p_value"] = *d.length_p_value;
    if (d.fallback) rb.warn(name + ": judge lengths are all equal; debiased score is the plain mean");
    return out;
}

template <typename F>
void try_criterion(ev::ReportBuilder& rb, ev::Criterion c, F&& compute) {
    try {
        rb.add(compute());
    } catch (const ValidationError& e) {
        rb.omit(c, e.what());
    } catch (const DegenerateInputError& e) {
        rb.omit(c, e.what());
    }
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream&) {
    RunConfig cfg = config_from(a.config);
    const double fraction = a.fraction.value_or(cfg.report_fraction);
    if (!(fraction > 0.0 && fraction <= 1.0)) throw UsageError("--fraction must be in (0, 1]");
    if (a.workers) cfg.workers = *a.workers;
    require_file(a.bench, "benchmark file");
    for (const auto* p : {&a.reference, &a.matrix, &a.reference_matrix, &a.robust_matrix}) {
        if (!p->empty()) require_file(*p, "input file");
    }

    const Benchmark bench = read_benchmark(a.bench);
    std::optional<Benchmark> reference;
    if (!a.reference.empty()) reference = read_benchmark(a.reference);
    std::optional<ev::CorrectnessMatrix> matrix, ref_matrix, robust_matrix;
    if (!a.matrix.empty()) matrix = ev::read_matrix(a.matrix);
    if (!a.reference_matrix.empty()) ref_matrix = ev::read_matrix(a.reference_matrix);
    if (!a.robust_matrix.empty()) robust_matrix = ev::read_matrix(a.robust_matrix);

    WorkerPool pool(static_cast<std::size_t>(cfg.workers));
    ev::ReportBuilder rb;
    rb.set_metadata("benchmark", a.bench);
    rb.set_metadata("generator_id", bench.generator_id);
    rb.set_metadata("demand", bench.demand.name);
    rb.set_metadata("created_at", format_utc(bench.created_at));
    rb.set_metadata("samples", std::to_string(bench.samples.size()));
    rb.set_metadata("fraction", num(fraction, 4));
    if (reference) rb.set_metadata("reference", a.reference);
    if (matrix) {
        std::string models;
        for (const auto& m : matrix->model_ids) models += (models.empty() ? "" : ",") + m;
        rb.set_metadata("models", models);
    }

    // Credibility.
    if (a.judge) {
        const auto judge = make_provider(cfg.provider(cfg.judge_provider, "judge"));
        const auto lib = library_for(cfg);
        const std::string gen = bench.generator_id.empty() ? "generated" : bench.generator_id;
        std::optional<std::string> ref_gen;
        if (reference) ref_gen = reference->generator_id.empty() || reference->generator_id == gen
                                     ? gen + "#reference"
                                     : reference->generator_id;
        std::vector<ev::JudgeRecord> faith, align;
        auto judge_all = [&](const Benchmark& b, const std::string& id) {
            auto f = ev::judge_benchmark(b, ev::JudgeCriterion::Faithfulness, *judge, lib, &pool,
                                         cfg.judge_parse_retries, id);
            auto al = ev::judge_benchmark(b, ev::JudgeCriterion::Alignment, *judge, lib, &pool,
                                          cfg.judge_parse_retries, id);
            faith.insert(faith.end(), f.begin(), f.end());
            align.insert(align.end(), al.begin(), al.end());
        };
        judge_all(bench, gen);
        if (reference) judge_all(*reference, *ref_gen);

        std::vector<ev::JudgeRecord> own_faith;
        for (const auto& r : faith) {
            if (r.generator_id == gen) own_faith.push_back(r);
        }
        const auto f = credibility(faith, gen, ref_gen, rb, "faithfulness");
        ev::CriterionResult fr{ev::Criterion::Faithfulness, f.value, std::nullopt, f.details};
        fr.details["noise_fraction"] = ev::noise_fraction(own_faith);
        rb.add(fr);
        const auto al = credibility(align, gen, ref_gen, rb, "alignment");
        rb.add({ev::Criterion::Alignment, al.value, std::nullopt, al.details});
        rb.rescale_credibility(f.reference, al.reference);

        std::vector<ev::JudgeRecord> all = faith;
        all.insert(all.end(), align.begin(), align.end());
        const fs::path judgments = (a.out.empty() ? fs::path(a.bench).replace_extension(".report.jsonl")
                                                  : fs::path(a.out))
                                       .string() +
                                   ".judgments.jsonl";
        write_file_atomic(judgments, ev::serialize_judgments(all));
        rb.set_metadata("judgments", judgments.string());
    } else {
        rb.omit(ev::Criterion::Faithfulness, "judging not requested (--judge)");
        rb.omit(ev::Criterion::Alignment, "judging not requested (--judge)");
    }

    // Diversity.
    try_criterion(rb, ev::Criterion::Lexical, [&] {
        return ev::CriterionResult{ev::Criterion::Lexical, ev::lexical_diversity(bench), std::nullopt, {}};
    });
    if (!cfg.embedding_provider.empty()) {
        const auto embedder = make_provider(cfg.provider(cfg.embedding_provider, "embedding"));
        try_criterion(rb, ev::Criterion::Semantic, [&] {
            return ev::CriterionResult{ev::Criterion::Semantic, ev::semantic_diversity(bench, *embedder, &pool),
                                       std::nullopt, {}};
        });
    } else {
        rb.omit(ev::Criterion::Semantic, "no embedding provider configured");
    }

    if (matrix) {
        try_criterion(rb, ev::Criterion::Knowledge, [&] {
            return ev::CriterionResult{ev::Criterion::Knowledge, ev::knowledge_diversity(bench, *matrix),
                                       std::nullopt, {}};
        });
        try_criterion(rb, ev::Criterion::Controllability, [&] {
            const auto r = ev::difficulty_controllability(bench, *matrix);
            return ev::CriterionResult{ev::Criterion::Controllability, r.r, r.p_value, {}};
        });
        try_criterion(rb, ev::Criterion::Boundary, [&] {
            const auto ids = ev::hardest_subset(bench, fraction);
            return ev::CriterionResult{ev::Criterion::Boundary,
                                       ev::difficulty_boundary(bench, *matrix, fraction),
                                       std::nullopt,
                                       {{"fraction", fraction}, {"subset_size", double(ids.size())}}};
        });
    } else {
        for (const auto c : {ev::Criterion::Knowledge, ev::Criterion::Controllability, ev::Criterion::Boundary})
            rb.omit(c, "no correctness matrix (--matrix)");
    }

    auto pearson_between = [&](ev::Criterion c, const std::optional<ev::CorrectnessMatrix>& other,
                               const char* missing) {
        if (!matrix || !other) {
            rb.omit(c, missing);
            return;
        }
        try_criterion(rb, c, [&] {
            const auto aligned = ev::align_accuracies(*matrix, *other);
            const auto r = c == ev::Criterion::Effectiveness ? ev::effectiveness(aligned.first, aligned.second)
                                                             : ev::robustness(aligned.first, aligned.second);
            return ev::CriterionResult{c, r.r, r.p_value, {{"models", double(aligned.model_ids.size())}}};
        });
    };
    pearson_between(ev::Criterion::Effectiveness, ref_matrix, "needs --matrix and --reference-matrix");
    pearson_between(ev::Criterion::Robustness, robust_matrix, "needs --matrix and --robust-matrix");

    try_criterion(rb, ev::Criterion::Efficiency, [&] {
        const auto e = ev::efficiency(bench);
        return ev::CriterionResult{ev::Criterion::Efficiency,
                                   e.dollars_per_item,
                                   std::nullopt,
                                   {{"dollars_per_item", e.dollars_per_item}, {"minutes_per_item", e.minutes_per_item}}};
    });
    if (bench.usage.estimated) rb.warn("efficiency: token counts were estimated by the provider wrapper");

    const auto report = rb.build();
    const fs::path report_path =
        a.out.empty() ? fs::path(a.bench).replace_extension(".report.jsonl") : fs::path(a.out);
    fs::path md_path = report_path;
    md_path.replace_extension(".md");
    const std::string markdown = ev::render_markdown(report, cfg.report_method);
    write_file_atomic(report_path, ev::serialize_report(report));
    write_file_atomic(md_path, markdown);
    out << markdown << "\nreport: " << report_path.string() << "\ntable: " << md_path.string() << "\n";
    return kExitOk;
}

// ---- debias -------------------------------------------------------------

int cmd_debias(const std::string& path, std::ostream& out) {
    require_file(path, "judgment file");
    const auto records = ev::parse_judgments(read_file(path));
    if (records.empty()) throw ValidationError("judgment file has no records");
    std::map<ev::JudgeCriterion, std::vector<ev::JudgeRecord>> by_criterion;
    for (const auto& r : records) by_criterion[r.criterion].push_back(r);
    for (const auto& [criterion, recs] : by_criterion) {
        const auto d = ev::debias_scores(recs);
        out << "criterion: " << ev::to_string(criterion) << "\n";
        for (const auto& [gen, score] : d.scores)
            out << "  " << gen << ": debiased " << num(score) << ", raw mean " << num(d.raw_means.at(gen)) << "\n";
        if (d.fallback) {
            out << "  judge lengths all equal; scores are per-generator means\n";
        } else {
            out << "  beta_len: " << num(*d.length_coefficient, 8) << " (p = " << num(*d.length_p_value, 6) << ")\n";
        }
    }
    return kExitOk;
}

// ---- reliability --------------------------------------------------------

struct ReliabilityArgs {
    double acc_a = 0.0, acc_b = 0.0, k = 0.0;
    std::int64_t n = 0;
    std::optional<double> p, p_b;
    std::optional<std::int64_t> simulate;
    std::uint64_t seed = 0;
    std::optional<int> workers;
};

int cmd_reliability(const ReliabilityArgs& a, std::ostream& out) {
    const auto r = reliability::rank_test({a.acc_a, a.acc_b, a.n, a.k, a.p});
    out << "z: " << num(r.z, 6) << "\n"
        << "winner: " << reliability::to_string(r.winner) << "\n"
        << "confidence: " << num(r.confidence, 6) << "\n"
        << "p_value: " << num(r.p_value, 6) << "\n";
    if (r.denoised_a) out << "denoised_a: " << num(*r.denoised_a, 6) << "\ndenoised_b: " << num(*r.denoised_b, 6) << "\n";
    if (a.simulate) {
        WorkerPool pool(static_cast<std::size_t>(a.workers.value_or(8)));
        reliability::SimulationParams sp;
        sp.true_a = a.acc_a;
        sp.true_b = a.acc_b;
        sp.n = a.n;
        sp.k = a.k;
        sp.p = a.p.value_or(0.25);
        sp.p_b = a.p_b;
        sp.trials = *a.simulate;
        sp.seed = a.seed;
        const auto s = reliability::validate_by_simulation(sp, &pool);
        out << "simulation trials: " << s.trials << "\n"
            << "empirical_rank_correct_rate: " << num(s.empirical_rank_correct_rate, 6) << "\n"
            << "mean_predicted_confidence: " << num(s.mean_predicted_confidence, 6) << "\n"
            << "difference: " << num(s.empirical_rank_correct_rate - s.mean_predicted_confidence, 6) << "\n";
    }
    return kExitOk;
}

// ---- convert ------------------------------------------------------------

int cmd_convert(const std::string& bench_path, const std::string& to, const std::string& out_path, std::ostream& out,
                std::ostream& err) {
    if (to != "otg") throw UsageError("--to supports only 'otg'");
    require_file(bench_path, "benchmark file");
    const Benchmark b = read_benchmark(bench_path);
    std::vector<OpenTextItem> items;
    std::size_t failed = 0;
    for (const auto& s : b.samples) {
        try {
            items.push_back(mcq_to_otg(s));
        } catch (const ValidationError& e) {
            ++failed;
            err << "skipped " << (s.id.empty() ? "<no id>" : s.id) << ":";
            for (const auto& v : e.violations()) err << " " << v << ";";
            err << "\n";
        }
    }
    if (!b.samples.empty() && items.empty()) {
        err << "no sample could be converted\n";
        return kExitRuntime;
    }
    write_file_atomic(out_path, serialize_open_text(items));
    out << "converted " << items.size() << " of " << b.samples.size() << " samples to " << out_path << "\n";
    return kExitOk;
}

// ---- rewrite-demand -----------------------------------------------------

int cmd_rewrite(const std::string& demand_path, const std::string& subset, const std::string& out_path,
                const std::string& config, const std::string& provider_name, std::ostream& out) {
    RunConfig cfg = config_from(config);
    const auto file = find_demand_file(cfg, demand_path);
    auto demands = parse_demands(read_file(file), file.stem().string());
    if (!subset.empty()) demands = {pick_demand(file, subset)};
    const std::string name = provider_name.empty() ? cfg.generator_provider : provider_name;
    const auto provider = make_provider(cfg.provider(name, "rewrite"));
    const auto lib = library_for(cfg);
    for (auto& d : demands) {
        const auto reply = provider->chat(
            ChatRequest::user(prompts::render(lib.get(prompts::kRewriteDemand), {{"demand", d.text}})));
        const auto rewritten = text::trim(reply.text);
        if (rewritten.empty()) throw ParseError("empty rewrite for subset " + d.name, reply.text);
        d.text = std::string(rewritten);
    }
    write_file_atomic(out_path, serialize_demands(demands));
    out << "rewrote " << demands.size() << " demand(s) to " << out_path << "\n";
    return kExitOk;
}

// ---- mock-script --------------------------------------------------------

struct MockArgs {
    int n = 10, attempts = 10, candidates = 5, options = 10, retries = 3, references = 8;
    double max_beta = 0.8, latency = 1.0;
    std::vector<std::size_t> fail;
    std::string mode = "staged", out, config_out, judge_out;
    bool no_describe = false;
    std::uint64_t seed = 7;
};

std::vector<std::string> judge_script(std::size_t samples) {
    static const double scores[] = {1.0, 1.0, 0.5, 1.0, 0.0};
    std::vector<std::string> script;
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < samples; ++i) {
            std::string analysis = "Analyses: Step 1 restates the question.";
            for (std::size_t k = 0; k < i % 4; ++k) analysis += " Step " + std::to_string(k + 2) + " checks a claim.";
            char score[16];
            std::snprintf(score, sizeof score, "%g", scores[(i + pass) % 5]);
            script.push_back(analysis + "\nJudgement:" + score);
        }
    }
    return script;
}

int cmd_mock_script(const MockArgs& a, std::ostream& out) {
    demo::ScriptOptions o;
    o.settings.samples = a.n;
    o.settings.attempts = a.attempts;
    o.settings.candidates = a.candidates;
    o.settings.references = a.references;
    o.settings.max_draft_retries = a.retries;
    o.settings.mode = a.mode == "direct" ? generator::Mode::Direct : generator::Mode::Staged;
    o.settings.describe_task = !a.no_describe;
    o.settings.seed = a.seed;
    o.option_count = a.options;
    o.max_beta = a.max_beta;
    for (const auto f : a.fail) {
        if (f < 1 || f > static_cast<std::size_t>(a.n)) throw UsageError("--fail takes sample numbers in [1, n]");
        o.failing_samples.insert(f - 1);
    }
    try {
        o.settings.validate();
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    if (a.options < 2 || a.options > 26) throw UsageError("--options must be in [2, 26]");
    if (!(a.max_beta >= 0.0 && a.max_beta <= 1.0)) throw UsageError("--max-beta must be in [0, 1]");

    const auto script = demo::build_script(o);
    write_file_atomic(a.out, serialize_script(script));
    out << "wrote " << script.size() << " responses to " << a.out << "\n";
    if (!a.judge_out.empty()) {
        write_file_atomic(a.judge_out, serialize_script(judge_script(static_cast<std::size_t>(a.n))));
        out << "wrote judge script to " << a.judge_out << "\n";
    }
    if (!a.config_out.empty()) {
        RunConfig cfg;
        ProviderConfig gen;
        gen.name = "mock";
        gen.kind = "mock";
        gen.latency_seconds = a.latency;
        gen.price_prompt_per_1k = 0.0005;
        gen.price_completion_per_1k = 0.0015;
        cfg.providers["mock"] = gen;
        cfg.generator_provider = "mock";
        cfg.generator = o.settings;
        cfg.option_count = a.options;
        cfg.seed_given = true;
        if (!a.judge_out.empty()) {
            ProviderConfig judge;
            judge.name = "judge";
            judge.kind = "mock";
            cfg.providers["judge"] = judge;
            cfg.judge_provider = "judge";
        }
        ProviderConfig embed;
        embed.name = "embed";
        embed.kind = "mock";
        cfg.providers["embed"] = embed;
        cfg.embedding_provider = "embed";

        auto rel = [&](const std::string& p) {
            return fs::absolute(p).lexically_relative(fs::absolute(a.config_out).parent_path()).string();
        };
        auto doc = nlohmann::ordered_json::parse(serialize_config(cfg));
        doc["providers"]["mock"]["script_file"] = rel(a.out);
        if (!a.judge_out.empty()) doc["providers"]["judge"]["script_file"] = rel(a.judge_out);
        const std::string text = doc.dump(2) + "\n";
        write_file_atomic(a.config_out, text);
        out << "wrote config to " << a.config_out << "\n";
    }
    return kExitOk;
}

bool is_usage(const std::exception& e) {
    return dynamic_cast<const UsageError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
           dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const FormatError*>(&e) ||
           dynamic_cast<const DomainError*>(&e) || dynamic_cast<const InconsistencyError*>(&e);
}

}  // namespace

Timestamp creation_time(const Provider& provider) {
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        char* end = nullptr;
        const long long v = std::strtoll(epoch, &end, 10);
        if (*end == '\0' && v >= 0) return Timestamp{std::chrono::seconds{v}};
        spdlog::warn("ignoring malformed SOURCE_DATE_EPOCH '{}'", epoch);
    }
    if (provider.deterministic()) return Timestamp{};
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Benchmark generation and evaluation toolkit", "benchgen"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every command");

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "Generate a benchmark from an assessment demand");
    gen->add_option("--demand", ga.demand, "Demand file (Subset Name / Assessment Demands blocks)")->required();
    gen->add_option("--n", ga.n, "Number of samples")->required();
    gen->add_option("--out", ga.out, "Output benchmark file")->required();
    gen->add_option("--seed", ga.seed, "Random seed");
    gen->add_option("--config", ga.config, "Run configuration (JSON)");
    gen->add_option("--subset", ga.subset, "Subset name inside the demand file");
    gen->add_option("--mode", ga.mode, "staged or direct")->check(CLI::IsMember({"staged", "direct"}));
    gen->add_option("--workers", ga.workers, "Worker pool size")->check(CLI::PositiveNumber);
    gen->add_option("--attempts", ga.attempts, "Test-taker attempts per sample (T)");
    gen->add_option("--references", ga.references, "Reference samples per prompt (R)");
    gen->add_option("--candidates", ga.candidates, "Candidates drafted per sample (L)");
    gen->add_option("--options", ga.options, "Options per question");

    EvaluateArgs ea;
    auto* eval = app.add_subcommand("evaluate", "Score a benchmark on the evaluation criteria");
    eval->add_option("--bench", ea.bench, "Benchmark file")->required();
    eval->add_option("--reference", ea.reference, "Reference benchmark for credibility rescaling");
    eval->add_option("--matrix", ea.matrix, "Correctness matrix for the benchmark");
    eval->add_option("--reference-matrix", ea.reference_matrix, "Correctness matrix of the reference benchmark");
    eval->add_option("--robust-matrix", ea.robust_matrix,
                     "Correctness matrix of a benchmark generated from a rewritten demand");
    eval->add_flag("--judge", ea.judge, "Judge faithfulness and alignment with the configured judge");
    eval->add_option("--fraction", ea.fraction, "Hardest fraction used for the difficulty boundary");
    eval->add_option("--config", ea.config, "Run configuration (JSON)");
    eval->add_option("--out", ea.out, "Report file (JSON lines); a .md table is written beside it");
    eval->add_option("--workers", ea.workers, "Worker pool size")->check(CLI::PositiveNumber);

    std::string judgments;
    auto* deb = app.add_subcommand("debias", "Length-debias judge scores across generators");
    deb->add_option("--judgments", judgments, "Judgment records (JSON lines)")->required();

    ReliabilityArgs ra;
    auto* rel = app.add_subcommand("reliability", "Rank test between two models' accuracies");
    rel->add_option("--acc-a", ra.acc_a, "Accuracy of model A")->required();
    rel->add_option("--acc-b", ra.acc_b, "Accuracy of model B")->required();
    rel->add_option("--n", ra.n, "Benchmark size")->required();
    rel->add_option("--k", ra.k, "Noise fraction K");
    rel->add_option("--p", ra.p, "Accuracy on noisy samples");
    rel->add_option("--p-b", ra.p_b, "Model B's accuracy on noisy samples (simulation only)");
    rel->add_option("--simulate", ra.simulate, "Monte-Carlo trials");
    rel->add_option("--seed", ra.seed, "Simulation seed");
    rel->add_option("--workers", ra.workers, "Worker pool size")->check(CLI::PositiveNumber);

    std::string cv_bench, cv_to, cv_out;
    auto* conv = app.add_subcommand("convert", "Convert a multiple-choice benchmark to open-text items");
    conv->add_option("--bench", cv_bench, "Benchmark file")->required();
    conv->add_option("--to", cv_to, "Target format")->required();
    conv->add_option("--out", cv_out, "Output file")->required();

    std::string rw_demand, rw_subset, rw_out, rw_config, rw_provider;
    auto* rw = app.add_subcommand("rewrite-demand", "Paraphrase assessment demands with the configured provider");
    rw->add_option("--demand", rw_demand, "Demand file")->required();
    rw->add_option("--subset", rw_subset, "Only rewrite this subset");
    rw->add_option("--out", rw_out, "Output demand file")->required();
    rw->add_option("--config", rw_config, "Run configuration (JSON)")->required();
    rw->add_option("--provider", rw_provider, "Provider name (defaults to the generator provider)");

    MockArgs ma;
    auto* mock = app.add_subcommand("mock-script", "Write a scripted provider run for offline generation");
    mock->add_option("--out", ma.out, "Script file (one JSON string per line)")->required();
    mock->add_option("--config-out", ma.config_out, "Also write a config that uses the script");
    mock->add_option("--judge-out", ma.judge_out, "Also write a judge script for evaluate --judge");
    mock->add_option("--n", ma.n, "Number of samples");
    mock->add_option("--attempts", ma.attempts, "Test-taker attempts per sample");
    mock->add_option("--candidates", ma.candidates, "Candidates per sample");
    mock->add_option("--references", ma.references, "Reference samples per prompt");
    mock->add_option("--options", ma.options, "Options per question");
    mock->add_option("--retries", ma.retries, "Draft retries");
    mock->add_option("--max-beta", ma.max_beta, "Mismatch rate of the last sample");
    mock->add_option("--fail", ma.fail, "Sample numbers (1-based) whose drafts always fail")->delimiter(',');
    mock->add_option("--mode", ma.mode, "staged or direct")->check(CLI::IsMember({"staged", "direct"}));
    mock->add_flag("--no-describe", ma.no_describe, "Skip the task description step");
    mock->add_option("--seed", ma.seed, "Seed written into the config");
    mock->add_option("--latency", ma.latency, "Virtual seconds charged per mock call");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (*gen) return cmd_generate(ga, out, err);
        if (*eval) return cmd_evaluate(ea, out, err);
        if (*deb) return cmd_debias(judgments, out);
        if (*rel) return cmd_reliability(ra, out);
        if (*conv) return cmd_convert(cv_bench, cv_to, cv_out, out, err);
        if (*rw) return cmd_rewrite(rw_demand, rw_subset, rw_out, rw_config, rw_provider, out);
        if (*mock) return cmd_mock_script(ma, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
            for (const auto& msg : v->violations()) err << "  - " << msg << "\n";
        }
        return is_usage(e) ? kExitUsage : kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace benchgen::cli
