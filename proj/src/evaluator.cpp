#include "benchgen/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "benchgen/error.hpp"
#include "benchgen/text.hpp"
#include "benchgen/worker_pool.hpp"

namespace benchgen::evaluator {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string join_ids(const std::vector<std::string>& ids, std::size_t limit = 10) {
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < limit; ++i) {
        if (i) out += ", ";
        out += ids[i];
    }
    if (ids.size() > limit) out += ", ... (" + std::to_string(ids.size()) + " total)";
    return out;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

template <typename T>
T field(const json& j, const char* name, std::size_t line) {
    const auto it = j.find(name);
    if (it == j.end()) throw FormatError("line " + std::to_string(line) + ": missing field " + name);
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw FormatError("line " + std::to_string(line) + ": field " + name + " has the wrong type");
    }
}

void reject_unknown(const json& j, const std::set<std::string>& known, std::size_t line) {
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw FormatError("line " + std::to_string(line) + ": unknown field " + key);
    }
}

template <typename F>
void for_each_record(const std::string& content, F&& fn) {
    std::size_t line_no = 0;
    for (std::string_view raw : text::split_lines(content)) {
        ++line_no;
        if (text::trim(raw).empty()) continue;
        json j;
        try {
            j = json::parse(raw);
        } catch (const json::parse_error& e) {
            throw FormatError("line " + std::to_string(line_no) + ": malformed record: " + e.what());
        }
        if (!j.is_object()) throw FormatError("line " + std::to_string(line_no) + ": record is not an object");
        fn(j, line_no);
    }
}

bool on_scale(double v) { return v == 0.0 || v == 0.5 || v == 1.0; }

std::string answer_line(const Sample& s) {
    const auto label = static_cast<std::size_t>(s.label);
    return "Answer: " + std::string(1, text::option_letter(label)) + ". " + s.options.at(label);
}

std::vector<double> column_of(const std::vector<BiasObservation>& obs, const std::string& name) {
    std::vector<double> out;
    out.reserve(obs.size());
    for (const auto& o : obs) {
        if (name == "difficulty") out.push_back(o.difficulty);
        if (name == "sample_length") out.push_back(o.sample_length);
        if (name == "judge_length") out.push_back(o.judge_length);
        if (name == "score") out.push_back(o.score);
    }
    return out;
}

}  // namespace

// ---- correctness matrix -------------------------------------------------

std::size_t CorrectnessMatrix::model_index(const std::string& id) const {
    const auto it = std::find(model_ids.begin(), model_ids.end(), id);
    if (it == model_ids.end()) throw ValidationError("unknown model id: " + id);
    return static_cast<std::size_t>(it - model_ids.begin());
}

std::size_t CorrectnessMatrix::sample_index(const std::string& id) const {
    const auto it = std::find(sample_ids.begin(), sample_ids.end(), id);
    if (it == sample_ids.end()) throw ValidationError("unknown sample id: " + id);
    return static_cast<std::size_t>(it - sample_ids.begin());
}

double CorrectnessMatrix::error_rate(std::size_t sample) const {
    if (model_ids.empty()) throw ValidationError("correctness matrix has no models");
    std::size_t wrong = 0;
    for (const auto& row : cells) wrong += !row.at(sample);
    return double(wrong) / double(model_ids.size());
}

double CorrectnessMatrix::accuracy(std::size_t model) const {
    const auto& row = cells.at(model);
    if (row.empty()) throw ValidationError("correctness matrix has no samples");
    return double(std::count(row.begin(), row.end(), true)) / double(row.size());
}

std::vector<bool> CorrectnessMatrix::column(std::size_t sample) const {
    std::vector<bool> col;
    col.reserve(cells.size());
    for (const auto& row : cells) col.push_back(row.at(sample));
    return col;
}

CorrectnessMatrix parse_matrix(const std::string& content) {
    CorrectnessMatrix m;
    std::map<std::string, std::size_t> model_pos, sample_pos;
    std::map<std::pair<std::size_t, std::size_t>, bool> values;
    for_each_record(content, [&](const json& j, std::size_t line) {
        reject_unknown(j, {"model_id", "sample_id", "correct"}, line);
        const auto model = field<std::string>(j, "model_id", line);
        const auto sample = field<std::string>(j, "sample_id", line);
        const auto correct = field<bool>(j, "correct", line);
        if (model.empty() || sample.empty()) throw FormatError("line " + std::to_string(line) + ": empty id");
        auto [mit, m_new] = model_pos.emplace(model, m.model_ids.size());
        if (m_new) m.model_ids.push_back(model);
        auto [sit, s_new] = sample_pos.emplace(sample, m.sample_ids.size());
        if (s_new) m.sample_ids.push_back(sample);
        if (!values.emplace(std::make_pair(mit->second, sit->second), correct).second)
            throw FormatError("line " + std::to_string(line) + ": duplicate record for " + model + "/" + sample);
    });
    if (m.model_ids.empty()) throw FormatError("correctness matrix is empty");
    m.cells.assign(m.model_ids.size(), std::vector<bool>(m.sample_ids.size(), false));
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < m.model_ids.size(); ++i) {
        for (std::size_t s = 0; s < m.sample_ids.size(); ++s) {
            const auto it = values.find({i, s});
            if (it == values.end()) {
                missing.push_back(m.model_ids[i] + "/" + m.sample_ids[s]);
            } else {
                m.cells[i][s] = it->second;
            }
        }
    }
    if (!missing.empty()) throw FormatError("correctness matrix is not rectangular; missing " + join_ids(missing));
    return m;
}

CorrectnessMatrix read_matrix(const std::filesystem::path& path) { return parse_matrix(read_file(path)); }

std::string serialize_matrix(const CorrectnessMatrix& m) {
    std::string out;
    for (std::size_t i = 0; i < m.model_ids.size(); ++i) {
        for (std::size_t s = 0; s < m.sample_ids.size(); ++s) {
            ordered_json j;
            j["model_id"] = m.model_ids[i];
            j["sample_id"] = m.sample_ids[s];
            j["correct"] = static_cast<bool>(m.cells[i][s]);
            out += j.dump() + "\n";
        }
    }
    return out;
}

// ---- judges -------------------------------------------------------------

std::string to_string(JudgeCriterion c) { return c == JudgeCriterion::Faithfulness ? "faithfulness" : "alignment"; }

std::optional<ParsedJudgement> parse_judgement(std::string_view response) {
    std::size_t at = text::rfind_ci(response, "judgement:");
    std::size_t marker_len = 10;
    if (at == std::string_view::npos) {
        at = text::rfind_ci(response, "judgment:");
        marker_len = 9;
    }
    if (at == std::string_view::npos) return std::nullopt;
    std::string_view rest = response.substr(at + marker_len);
    while (!rest.empty() && (std::isspace(static_cast<unsigned char>(rest.front())) || rest.front() == '{' ||
                             rest.front() == '*'))
        rest.remove_prefix(1);
    const std::string number(rest.substr(0, rest.find_first_not_of("0123456789.")));
    if (number.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(number.c_str(), &end);
    if (end != number.c_str() + number.size() || !on_scale(v)) return std::nullopt;

    std::string_view rationale = text::trim(response.substr(0, at));
    if (text::find_ci(rationale, "analyses:") == 0) rationale.remove_prefix(9);
    return ParsedJudgement{v, text::tokenize(rationale).size()};
}

std::string faithfulness_prompt(const Sample& s, const prompts::Library& lib) {
    return prompts::render(lib.get(prompts::kFaithfulnessJudge),
                           {{"question", render_question_with_options(s)}, {"response", s.rationale + "\n" + answer_line(s)}});
}

std::string alignment_prompt(const Sample& s, const AssessmentDemand& demand, const prompts::Library& lib) {
    return prompts::render(lib.get(prompts::kRelevanceJudge),
                           {{"question", render_question_with_options(s)}, {"ability", demand.text}});
}

namespace {

JudgeRecord judge_one(const Sample& s, const std::string& prompt, JudgeCriterion criterion,
                      const std::string& generator_id, Provider& judge, int parse_retries) {
    if (auto v = validate_sample(s); !v.empty()) throw ValidationError("cannot judge invalid sample " + s.id, v);
    const auto req = ChatRequest::user(prompt);
    std::string raw;
    for (int attempt = 0; attempt <= parse_retries; ++attempt) {
        raw = judge.chat(req).text;
        if (auto p = parse_judgement(raw))
            return JudgeRecord{s.id, generator_id, criterion, p->score, p->rationale_length, raw};
    }
    throw ParseError(to_string(criterion) + " judgement for " + s.id + " unparseable after " +
                         std::to_string(parse_retries + 1) + " attempts",
                     raw);
}

}  // namespace

JudgeRecord judge_faithfulness(const Sample& s, const std::string& generator_id, Provider& judge,
                               const prompts::Library& lib, int parse_retries) {
    return judge_one(s, faithfulness_prompt(s, lib), JudgeCriterion::Faithfulness, generator_id, judge, parse_retries);
}

JudgeRecord judge_alignment(const Sample& s, const AssessmentDemand& demand, const std::string& generator_id,
                            Provider& judge, const prompts::Library& lib, int parse_retries) {
    return judge_one(s, alignment_prompt(s, demand, lib), JudgeCriterion::Alignment, generator_id, judge,
                     parse_retries);
}

std::vector<JudgeRecord> judge_benchmark(const Benchmark& b, JudgeCriterion criterion, Provider& judge,
                                         const prompts::Library& lib, WorkerPool* pool, int parse_retries,
                                         const std::string& generator_id) {
    const std::string gen = generator_id.empty() ? b.generator_id : generator_id;
    const std::size_t n = b.samples.size();
    std::vector<ChatRequest> requests;
    requests.reserve(n);
    for (const auto& s : b.samples) {
        if (auto v = validate_sample(s); !v.empty()) throw ValidationError("cannot judge invalid sample " + s.id, v);
        requests.push_back(ChatRequest::user(criterion == JudgeCriterion::Faithfulness ? faithfulness_prompt(s, lib)
                                                                                        : alignment_prompt(s, b.demand, lib)));
    }

    std::vector<std::optional<JudgeRecord>> out(n);
    std::vector<std::string> last_raw(n);
    std::vector<std::size_t> pending(n);
    std::iota(pending.begin(), pending.end(), 0);
    for (int round = 0; round <= parse_retries && !pending.empty(); ++round) {
        std::vector<ChatRequest> batch;
        for (const auto i : pending) batch.push_back(requests[i]);
        const auto replies = judge.chat_batch(batch, pool);
        std::vector<std::size_t> still;
        for (std::size_t k = 0; k < pending.size(); ++k) {
            const auto i = pending[k];
            last_raw[i] = replies[k].text;
            if (auto p = parse_judgement(replies[k].text)) {
                out[i] = JudgeRecord{b.samples[i].id, gen, criterion, p->score, p->rationale_length, replies[k].text};
            } else {
                still.push_back(i);
            }
        }
        pending = std::move(still);
    }
    if (!pending.empty()) {
        const auto i = pending.front();
        throw ParseError(to_string(criterion) + " judgement for " + b.samples[i].id + " unparseable after " +
                             std::to_string(parse_retries + 1) + " attempts",
                         last_raw[i]);
    }
    std::vector<JudgeRecord> records;
    records.reserve(n);
    for (auto& r : out) records.push_back(std::move(*r));
    return records;
}

std::vector<JudgeRecord> parse_judgments(const std::string& content) {
    std::vector<JudgeRecord> out;
    for_each_record(content, [&](const json& j, std::size_t line) {
        reject_unknown(j, {"sample_id", "generator_id", "criterion", "score", "rationale_length", "raw_text"}, line);
        JudgeRecord r;
        r.sample_id = field<std::string>(j, "sample_id", line);
        r.generator_id = field<std::string>(j, "generator_id", line);
        const auto crit = field<std::string>(j, "criterion", line);
        if (crit == "faithfulness") {
            r.criterion = JudgeCriterion::Faithfulness;
        } else if (crit == "alignment") {
            r.criterion = JudgeCriterion::Alignment;
        } else {
            throw FormatError("line " + std::to_string(line) + ": unknown criterion " + crit);
        }
        r.score = field<double>(j, "score", line);
        if (!on_scale(r.score)) throw FormatError("line " + std::to_string(line) + ": score must be 0, 0.5 or 1");
        const auto len = field<double>(j, "rationale_length", line);
        if (!(len >= 0.0) || len != std::floor(len))
            throw FormatError("line " + std::to_string(line) + ": rationale_length must be a non-negative integer");
        r.rationale_length = static_cast<std::size_t>(len);
        if (j.contains("raw_text")) r.raw_text = field<std::string>(j, "raw_text", line);
        out.push_back(std::move(r));
    });
    return out;
}

std::string serialize_judgments(const std::vector<JudgeRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        ordered_json j;
        j["sample_id"] = r.sample_id;
        j["generator_id"] = r.generator_id;
        j["criterion"] = to_string(r.criterion);
        j["score"] = r.score;
        j["rationale_length"] = r.rationale_length;
        j["raw_text"] = r.raw_text;
        out += j.dump() + "\n";
    }
    return out;
}

// ---- debiasing ----------------------------------------------------------

DebiasResult debias_observations(const std::vector<std::string>& generator_ids, const std::vector<double>& lengths,
                                 const std::vector<double>& scores) {
    const std::size_t n = generator_ids.size();
    if (lengths.size() != n || scores.size() != n) throw ValidationError("debias inputs differ in length");
    std::map<std::string, std::size_t> counts;
    for (const auto& g : generator_ids) ++counts[g];
    if (counts.size() < 2) throw ValidationError("debiasing needs records from at least 2 generators");
    std::vector<std::string> thin;
    for (const auto& [g, c] : counts) {
        if (c < 3) thin.push_back(g);
    }
    if (!thin.empty()) throw ValidationError("fewer than 3 records for generator(s): " + join_ids(thin));

    DebiasResult res;
    std::map<std::string, double> sums;
    for (std::size_t i = 0; i < n; ++i) sums[generator_ids[i]] += scores[i];
    for (const auto& [g, c] : counts) res.raw_means[g] = sums[g] / double(c);

    const auto [lo, hi] = std::minmax_element(lengths.begin(), lengths.end());
    if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(*hi))) {
        res.fallback = true;
        res.scores = res.raw_means;
        return res;
    }

    const double mean_len = std::accumulate(lengths.begin(), lengths.end(), 0.0) / double(n);
    stats::Design d;
    std::map<std::string, Eigen::Index> col;
    for (const auto& [g, _] : counts) {
        col[g] = static_cast<Eigen::Index>(d.names.size());
        d.names.push_back(g);
    }
    d.names.push_back("judge_length");
    d.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d.names.size()));
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        d.values(row, col.at(generator_ids[i])) = 1.0;
        d.values(row, static_cast<Eigen::Index>(counts.size())) = lengths[i] - mean_len;
    }
    const auto fit = stats::ols(d, scores);
    for (const auto& [g, _] : counts) res.scores[g] = fit.coefficients.at(g);
    res.length_coefficient = fit.coefficients.at("judge_length");
    res.length_p_value = fit.p_values.at("judge_length");
    return res;
}

DebiasResult debias_scores(const std::vector<JudgeRecord>& records) {
    std::vector<std::string> gens;
    std::vector<double> lengths, scores;
    for (const auto& r : records) {
        gens.push_back(r.generator_id);
        lengths.push_back(double(r.rationale_length));
        scores.push_back(r.score);
    }
    return debias_observations(gens, lengths, scores);
}

double noise_fraction(const std::vector<JudgeRecord>& records) {
    std::size_t judged = 0, zero = 0;
    for (const auto& r : records) {
        if (r.criterion != JudgeCriterion::Faithfulness) continue;
        ++judged;
        zero += r.score == 0.0;
    }
    if (judged == 0) throw ValidationError("no faithfulness judgements to estimate the noise fraction from");
    return double(zero) / double(judged);
}

// ---- bias scan ----------------------------------------------------------

const BiasCell& BiasScan::raw_cell(const std::string& x, const std::string& y) const {
    for (const auto& c : raw) {
        if ((c.x == x && c.y == y) || (c.x == y && c.y == x)) return c;
    }
    throw ValidationError("no raw bias cell for " + x + "/" + y);
}

const BiasCell& BiasScan::partial_cell(const std::string& x) const {
    for (const auto& c : partial) {
        if (c.x == x) return c;
    }
    throw ValidationError("no partial bias cell for " + x);
}

BiasScan bias_scan(const std::vector<BiasObservation>& observations) {
    if (observations.size() < 10) throw ValidationError("bias scan needs at least 10 records");
    static const std::vector<std::string> names = {"difficulty", "sample_length", "judge_length", "score"};
    BiasScan scan;
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            BiasCell cell{names[i], names[j], std::nullopt};
            try {
                cell.result = stats::pearson(column_of(observations, names[i]), column_of(observations, names[j]));
            } catch (const DegenerateInputError&) {
            }
            scan.raw.push_back(std::move(cell));
        }
    }
    const auto control = column_of(observations, "judge_length");
    const auto score = column_of(observations, "score");
    for (const char* x : {"difficulty", "sample_length"}) {
        BiasCell cell{x, "score", std::nullopt};
        try {
            cell.result = stats::partial_correlation(column_of(observations, x), score, control);
        } catch (const DegenerateInputError&) {
        }
        scan.partial.push_back(std::move(cell));
    }
    return scan;
}

// ---- diversity ----------------------------------------------------------

double lexical_diversity(const Benchmark& b, stats::EntropyEstimator estimator) {
    if (b.samples.size() < 2) throw ValidationError("lexical diversity needs at least 2 samples");
    std::vector<std::string> corpus;
    for (const auto& s : b.samples) {
        std::string t = s.question;
        for (const auto& o : s.options) t += "\n" + o;
        corpus.push_back(std::move(t));
    }
    return stats::word_entropy(corpus, estimator);
}

double semantic_diversity(const Benchmark& b, Provider& embedder, WorkerPool* pool) {
    if (b.samples.size() < 2) throw ValidationError("semantic diversity needs at least 2 samples");
    auto vectors = parallel_map(pool, b.samples.size(),
                                [&](std::size_t i) { return embedder.embed(b.samples[i].question).vector; });
    return stats::mean_pairwise_euclidean(vectors);
}

double knowledge_diversity(const CorrectnessMatrix& m) {
    std::vector<std::vector<bool>> cols;
    for (std::size_t s = 0; s < m.sample_ids.size(); ++s) cols.push_back(m.column(s));
    return stats::mean_pairwise_hamming(cols);
}

double knowledge_diversity(const Benchmark& b, const CorrectnessMatrix& m) {
    if (b.samples.size() < 2) throw ValidationError("knowledge diversity needs at least 2 samples");
    std::vector<std::vector<bool>> cols;
    std::vector<std::string> missing;
    for (const auto& s : b.samples) {
        const auto it = std::find(m.sample_ids.begin(), m.sample_ids.end(), s.id);
        if (it == m.sample_ids.end()) {
            missing.push_back(s.id);
            continue;
        }
        cols.push_back(m.column(static_cast<std::size_t>(it - m.sample_ids.begin())));
    }
    if (!missing.empty()) throw ValidationError("correctness matrix lacks samples: " + join_ids(missing), missing);
    return stats::mean_pairwise_hamming(cols);
}

// ---- difficulty ---------------------------------------------------------

std::vector<double> difficulty_values(const Benchmark& b) {
    std::vector<std::string> no_label, no_level;
    for (const auto& s : b.samples) {
        if (!s.difficulty_label) no_label.push_back(s.id);
        if (!s.declared_level) no_level.push_back(s.id);
    }
    std::vector<double> out;
    if (no_label.empty()) {
        for (const auto& s : b.samples) out.push_back(*s.difficulty_label);
    } else if (no_level.empty()) {
        for (const auto& s : b.samples) out.push_back(double(*s.declared_level));
    } else {
        throw ValidationError("samples without a difficulty label: " + join_ids(no_label), no_label);
    }
    return out;
}

std::vector<double> error_rates(const Benchmark& b, const CorrectnessMatrix& m) {
    std::vector<double> out;
    std::vector<std::string> missing;
    for (const auto& s : b.samples) {
        const auto it = std::find(m.sample_ids.begin(), m.sample_ids.end(), s.id);
        if (it == m.sample_ids.end()) {
            missing.push_back(s.id);
            continue;
        }
        out.push_back(m.error_rate(static_cast<std::size_t>(it - m.sample_ids.begin())));
    }
    if (!missing.empty()) throw ValidationError("correctness matrix lacks samples: " + join_ids(missing), missing);
    return out;
}

stats::CorrelationResult difficulty_controllability(const Benchmark& b, const CorrectnessMatrix& m) {
    const auto labels = difficulty_values(b);
    const auto truth = error_rates(b, m);
    return stats::spearman(labels, truth);
}

std::vector<std::string> hardest_subset(const Benchmark& b, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("fraction must be in (0, 1]");
    if (b.samples.empty()) throw ValidationError("benchmark has no samples");
    const auto diff = difficulty_values(b);
    std::vector<std::size_t> order(b.samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (diff[x] != diff[y]) return diff[x] > diff[y];
        return b.samples[x].id < b.samples[y].id;
    });
    const double raw = std::ceil(fraction * double(b.samples.size()) - 1e-9);
    const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(raw), 1, b.samples.size());
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < k; ++i) ids.push_back(b.samples[order[i]].id);
    return ids;
}

double difficulty_boundary(const Benchmark& b, const CorrectnessMatrix& m, double fraction) {
    const auto ids = hardest_subset(b, fraction);
    double total = 0.0;
    for (const auto& id : ids) total += m.error_rate(m.sample_index(id));
    return total / double(ids.size());
}

// ---- benchmark level ----------------------------------------------------

AlignedAccuracies align_accuracies(const CorrectnessMatrix& a, const CorrectnessMatrix& b) {
    AlignedAccuracies out;
    for (std::size_t i = 0; i < a.model_ids.size(); ++i) {
        const auto it = std::find(b.model_ids.begin(), b.model_ids.end(), a.model_ids[i]);
        if (it == b.model_ids.end()) continue;
        out.model_ids.push_back(a.model_ids[i]);
        out.first.push_back(a.accuracy(i));
        out.second.push_back(b.accuracy(static_cast<std::size_t>(it - b.model_ids.begin())));
    }
    if (out.model_ids.size() < 3)
        throw ValidationError("need at least 3 models shared by both matrices, found " +
                              std::to_string(out.model_ids.size()));
    return out;
}

stats::CorrelationResult effectiveness(std::span<const double> acc_generated, std::span<const double> acc_reference) {
    return stats::pearson(acc_generated, acc_reference);
}

stats::CorrelationResult robustness(std::span<const double> acc_a, std::span<const double> acc_b) {
    return stats::pearson(acc_a, acc_b);
}

Efficiency efficiency(const Benchmark& b) {
    if (b.samples.empty()) throw ValidationError("efficiency of an empty benchmark is undefined");
    const double n = double(b.samples.size());
    return Efficiency{b.usage.dollars / n, b.usage.wall_seconds / 60.0 / n};
}

// ---- report -------------------------------------------------------------

const std::vector<Criterion>& all_criteria() {
    static const std::vector<Criterion> all = {
        Criterion::Faithfulness,    Criterion::Alignment, Criterion::Lexical,       Criterion::Semantic,
        Criterion::Knowledge,       Criterion::Controllability, Criterion::Boundary, Criterion::Effectiveness,
        Criterion::Robustness,      Criterion::Efficiency,
    };
    return all;
}

std::string to_string(Criterion c) {
    switch (c) {
        case Criterion::Faithfulness: return "faithfulness";
        case Criterion::Alignment: return "alignment";
        case Criterion::Lexical: return "lexical";
        case Criterion::Semantic: return "semantic";
        case Criterion::Knowledge: return "knowledge";
        case Criterion::Controllability: return "controllability";
        case Criterion::Boundary: return "boundary";
        case Criterion::Effectiveness: return "effectiveness";
        case Criterion::Robustness: return "robustness";
        case Criterion::Efficiency: return "efficiency";
    }
    return "unknown";
}

std::string group_of(Criterion c) {
    switch (c) {
        case Criterion::Faithfulness:
        case Criterion::Alignment: return "Credibility";
        case Criterion::Lexical:
        case Criterion::Semantic:
        case Criterion::Knowledge: return "Diversity";
        case Criterion::Controllability:
        case Criterion::Boundary: return "Difficulty";
        default: return "Benchmark-Level";
    }
}

const CriterionResult* EvaluationReport::find(Criterion c) const {
    for (const auto& r : results) {
        if (r.criterion == c) return &r;
    }
    return nullptr;
}

void ReportBuilder::add(CriterionResult result) {
    for (const auto& r : results_) {
        if (r.criterion == result.criterion)
            throw ValidationError("criterion " + to_string(result.criterion) + " submitted twice");
    }
    results_.push_back(std::move(result));
}

void ReportBuilder::omit(Criterion c, std::string reason) { omitted_[c] = std::move(reason); }

void ReportBuilder::warn(std::string message) { warnings_.push_back(std::move(message)); }

void ReportBuilder::set_metadata(const std::string& key, std::string value) { metadata_[key] = std::move(value); }

void ReportBuilder::rescale_credibility(std::optional<double> faithfulness_reference,
                                        std::optional<double> alignment_reference) {
    faith_ref_ = faithfulness_reference;
    align_ref_ = alignment_reference;
}

EvaluationReport ReportBuilder::build() const {
    EvaluationReport r;
    r.metadata = metadata_;
    r.warnings = warnings_;
    for (const Criterion c : all_criteria()) {
        const auto it = std::find_if(results_.begin(), results_.end(),
                                     [&](const CriterionResult& x) { return x.criterion == c; });
        if (it == results_.end()) {
            const auto why = omitted_.find(c);
            r.warnings.push_back(to_string(c) + " not computed: " +
                                 (why == omitted_.end() ? std::string("no inputs supplied") : why->second));
            continue;
        }
        CriterionResult res = *it;
        const std::optional<double>& ref = c == Criterion::Faithfulness ? faith_ref_
                                           : c == Criterion::Alignment  ? align_ref_
                                                                        : std::optional<double>{};
        if (ref) {
            if (*ref > 0.0) {
                res.details["unscaled"] = res.value;
                res.details["reference"] = *ref;
                res.value /= *ref;
            } else {
                r.warnings.push_back(to_string(c) + " not rescaled: reference score is not positive");
            }
        }
        r.results.push_back(std::move(res));
    }
    return r;
}

std::string serialize_report(const EvaluationReport& r) {
    ordered_json summary;
    summary["type"] = "summary";
    for (const auto& res : r.results) summary[to_string(res.criterion)] = res.value;
    std::string out = summary.dump() + "\n";
    for (const auto& res : r.results) {
        ordered_json j;
        j["type"] = "criterion";
        j["criterion"] = to_string(res.criterion);
        j["group"] = group_of(res.criterion);
        j["value"] = res.value;
        j["p_value"] = res.p_value ? ordered_json(*res.p_value) : ordered_json(nullptr);
        ordered_json details = ordered_json::object();
        for (const auto& [k, v] : res.details) details[k] = v;
        j["details"] = details;
        out += j.dump() + "\n";
    }
    ordered_json meta;
    meta["type"] = "metadata";
    for (const auto& [k, v] : r.metadata) meta[k] = v;
    out += meta.dump() + "\n";
    ordered_json warn;
    warn["type"] = "warnings";
    warn["warnings"] = r.warnings;
    out += warn.dump() + "\n";
    return out;
}

std::string render_markdown(const EvaluationReport& r, const std::string& method) {
    static const std::vector<std::pair<Criterion, std::string>> columns = {
        {Criterion::Faithfulness, "Faithful"}, {Criterion::Alignment, "Alignment"},
        {Criterion::Lexical, "Lexical"},       {Criterion::Semantic, "Semantic"},
        {Criterion::Knowledge, "Knowledge"},   {Criterion::Controllability, "Control"},
        {Criterion::Boundary, "Boundary"},     {Criterion::Effectiveness, "Effective"},
        {Criterion::Robustness, "Robust"},     {Criterion::Efficiency, "Efficiency"},
    };
    std::string header = "| Methods |", rule = "| --- |", row = "| " + method + " |";
    for (const auto& [c, name] : columns) {
        header += " " + name + " |";
        rule += " --- |";
        const CriterionResult* res = r.find(c);
        std::string cell = "-";
        if (res && c == Criterion::Efficiency) {
            const auto minutes = res->details.find("minutes_per_item");
            cell = fixed(res->value, 3) + ", " + (minutes == res->details.end() ? "-" : fixed(minutes->second, 2));
        } else if (res) {
            cell = fixed(res->value, 3);
        }
        row += " " + cell + " |";
    }
    std::string out = header + "\n" + rule + "\n" + row + "\n";
    out += "\nUnits: Faithful/Alignment unbiased score; Lexical entropy (bits); Semantic Euclidean distance; "
           "Knowledge Hamming distance; Control Spearman; Boundary error rate; Effective/Robust Pearson; "
           "Efficiency $/item, min/item.\n";
    if (!r.warnings.empty()) {
        out += "\nWarnings:\n";
        for (const auto& w : r.warnings) out += "- " + w + "\n";
    }
    return out;
}

}  // namespace benchgen::evaluator
