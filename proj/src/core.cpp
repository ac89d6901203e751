#include "benchgen/core.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "benchgen/error.hpp"
#include "benchgen/text.hpp"

namespace benchgen {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

// Howard Hinnant's civil calendar algorithms.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw FormatError("line " + std::to_string(line) + ": " + msg);
}

const json& require(const json& obj, const char* field, std::size_t line) {
    auto it = obj.find(field);
    if (it == obj.end()) fail(line, std::string("missing field ") + field);
    return *it;
}

std::string get_string(const json& obj, const char* field, std::size_t line) {
    const json& v = require(obj, field, line);
    if (!v.is_string()) fail(line, std::string("field ") + field + ": expected string");
    return v.get<std::string>();
}

std::int64_t get_integer(const json& obj, const char* field, std::size_t line) {
    const json& v = require(obj, field, line);
    if (!v.is_number_integer()) fail(line, std::string("field ") + field + ": expected integer");
    return v.get<std::int64_t>();
}

double get_number(const json& obj, const char* field, std::size_t line) {
    const json& v = require(obj, field, line);
    if (!v.is_number()) fail(line, std::string("field ") + field + ": expected number");
    return v.get<double>();
}

std::vector<std::string> get_string_array(const json& obj, const char* field, std::size_t line) {
    const json& v = require(obj, field, line);
    if (!v.is_array()) fail(line, std::string("field ") + field + ": expected array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) fail(line, std::string("field ") + field + ": expected array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

const std::set<std::string>& sample_fields() {
    static const std::set<std::string> fields{"id",         "question",       "rationale",  "options",
                                              "label",      "difficulty_label", "declared_level", "attributes",
                                              "strategies", "reference_uses"};
    return fields;
}

Sample sample_from_json(const json& obj, std::size_t line) {
    for (const auto& [key, _] : obj.items()) {
        if (!sample_fields().contains(key)) fail(line, "unexpected field " + key);
    }
    Sample s;
    s.id = get_string(obj, "id", line);
    s.question = get_string(obj, "question", line);
    s.rationale = get_string(obj, "rationale", line);
    s.options = get_string_array(obj, "options", line);
    s.label = get_integer(obj, "label", line);

    const json& diff = require(obj, "difficulty_label", line);
    if (!diff.is_null()) {
        if (!diff.is_number()) fail(line, "field difficulty_label: expected number or null");
        s.difficulty_label = diff.get<double>();
    }
    const json& level = require(obj, "declared_level", line);
    if (!level.is_null()) {
        if (!level.is_number_integer()) fail(line, "field declared_level: expected integer or null");
        s.declared_level = level.get<int>();
    }
    const json& attrs = require(obj, "attributes", line);
    if (!attrs.is_object()) fail(line, "field attributes: expected string map");
    for (const auto& [k, v] : attrs.items()) {
        if (!v.is_string()) fail(line, "field attributes: expected string map");
        s.attributes.emplace(k, v.get<std::string>());
    }
    s.strategies = get_string_array(obj, "strategies", line);
    s.reference_uses = get_integer(obj, "reference_uses", line);
    return s;
}

ordered_json sample_to_json(const Sample& s) {
    ordered_json j;
    j["id"] = s.id;
    j["question"] = s.question;
    j["rationale"] = s.rationale;
    j["options"] = s.options;
    j["label"] = s.label;
    j["difficulty_label"] = s.difficulty_label ? ordered_json(*s.difficulty_label) : ordered_json(nullptr);
    j["declared_level"] = s.declared_level ? ordered_json(*s.declared_level) : ordered_json(nullptr);
    j["attributes"] = ordered_json::object();
    for (const auto& [k, v] : s.attributes) j["attributes"][k] = v;
    j["strategies"] = s.strategies;
    j["reference_uses"] = s.reference_uses;
    return j;
}

ordered_json usage_to_json(const UsageMeter& u) {
    ordered_json j;
    j["prompt_tokens"] = u.prompt_tokens;
    j["completion_tokens"] = u.completion_tokens;
    j["wall_seconds"] = u.wall_seconds;
    j["dollars"] = u.dollars;
    j["estimated"] = u.estimated;
    return j;
}

UsageMeter usage_from_json(const json& j, std::size_t line) {
    if (!j.is_object()) fail(line, "field usage: expected object");
    UsageMeter u;
    const auto tokens = [&](const char* f) {
        const std::int64_t v = get_integer(j, f, line);
        if (v < 0) fail(line, std::string("field usage.") + f + ": negative");
        return static_cast<std::uint64_t>(v);
    };
    u.prompt_tokens = tokens("prompt_tokens");
    u.completion_tokens = tokens("completion_tokens");
    u.wall_seconds = get_number(j, "wall_seconds", line);
    u.dollars = get_number(j, "dollars", line);
    if (auto it = j.find("estimated"); it != j.end()) {
        if (!it->is_boolean()) fail(line, "field usage.estimated: expected boolean");
        u.estimated = it->get<bool>();
    }
    return u;
}

}  // namespace

std::string format_utc(Timestamp t) {
    const std::int64_t secs = t.time_since_epoch().count();
    std::int64_t days = secs / 86400;
    std::int64_t rem = secs % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<long long>(y), m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

Timestamp parse_utc(const std::string& s) {
    long long y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, se = 0;
    char z = 0;
    if (std::sscanf(s.c_str(), "%lld-%u-%uT%u:%u:%u%c", &y, &mo, &d, &h, &mi, &se, &z) != 7 || z != 'Z' ||
        mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60) {
        throw FormatError("invalid UTC timestamp: " + s);
    }
    const std::int64_t days = days_from_civil(y, mo, d);
    return Timestamp{std::chrono::seconds{days * 86400 + h * 3600 + mi * 60 + se}};
}

UsageMeter& UsageMeter::operator+=(const UsageMeter& other) {
    prompt_tokens += other.prompt_tokens;
    completion_tokens += other.completion_tokens;
    wall_seconds += other.wall_seconds;
    dollars += other.dollars;
    estimated = estimated || other.estimated;
    return *this;
}

std::vector<std::string> validate_sample(const Sample& s, std::optional<int> attempts) {
    std::vector<std::string> violations;
    if (s.id.empty()) violations.emplace_back("empty id");
    if (text::trim(s.question).empty()) violations.emplace_back("empty question");
    if (s.options.size() < 2) violations.emplace_back("fewer than 2 options");
    if (s.label < 0 || static_cast<std::uint64_t>(s.label) >= s.options.size())
        violations.emplace_back("label out of range");

    std::set<std::string> seen;
    bool duplicate = false;
    bool empty = false;
    for (const auto& o : s.options) {
        if (text::trim(o).empty()) empty = true;
        if (!seen.insert(o).second) duplicate = true;
    }
    if (empty) violations.emplace_back("empty option");
    if (duplicate) violations.emplace_back("duplicate option");

    if (s.difficulty_label) {
        const double b = *s.difficulty_label;
        if (!(b >= 0.0 && b <= 1.0)) {
            violations.emplace_back("difficulty_label outside [0,1]");
        } else if (attempts && *attempts > 0) {
            const double scaled = b * *attempts;
            if (std::abs(scaled - std::round(scaled)) > 1e-9)
                violations.emplace_back("difficulty_label not a multiple of 1/" + std::to_string(*attempts));
        }
    }
    if (s.declared_level && (*s.declared_level < 1 || *s.declared_level > 10))
        violations.emplace_back("declared_level outside [1,10]");
    if (s.reference_uses < 0) violations.emplace_back("negative reference_uses");
    return violations;
}

OpenTextItem mcq_to_otg(const Sample& s) {
    auto violations = validate_sample(s);
    if (text::trim(s.rationale).empty()) violations.emplace_back("empty rationale");
    if (!violations.empty()) {
        std::string msg = "sample " + s.id + " invalid:";
        for (const auto& v : violations) msg += " " + v + ";";
        throw ValidationError(msg, violations);
    }
    return OpenTextItem{s.question, s.rationale, s.options[static_cast<std::size_t>(s.label)]};
}

std::string sample_id_for(std::size_t ordinal) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "s%06zu", ordinal);
    return buf;
}

std::string render_options(const std::vector<std::string>& options) {
    std::string out;
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (i) out += '\n';
        out += text::option_letter(i);
        out += ". ";
        out += options[i];
    }
    return out;
}

std::string render_question_with_options(const Sample& s) { return s.question + "\n" + render_options(s.options); }

Benchmark parse_benchmark(const std::string& content) {
    Benchmark b;
    std::set<std::string> ids;
    bool first_record = true;
    std::size_t line_no = 0;
    for (std::string_view raw : text::split_lines(content)) {
        ++line_no;
        if (text::trim(raw).empty()) continue;
        json obj;
        try {
            obj = json::parse(raw);
        } catch (const json::parse_error& e) {
            fail(line_no, std::string("invalid JSON (") + e.what() + ")");
        }
        if (!obj.is_object()) fail(line_no, "expected object");

        if (first_record && obj.contains("demand")) {
            first_record = false;
            const json& d = obj["demand"];
            if (!d.is_object()) fail(line_no, "field demand: expected object");
            b.demand.name = get_string(d, "name", line_no);
            b.demand.text = get_string(d, "text", line_no);
            b.demand.option_count = static_cast<int>(get_integer(d, "option_count", line_no));
            b.generator_id = get_string(obj, "generator_id", line_no);
            try {
                b.created_at = parse_utc(get_string(obj, "created_at", line_no));
            } catch (const FormatError&) {
                fail(line_no, "field created_at: expected UTC timestamp");
            }
            if (auto it = obj.find("usage"); it != obj.end()) b.usage = usage_from_json(*it, line_no);
            continue;
        }
        first_record = false;
        Sample s = sample_from_json(obj, line_no);
        if (!ids.insert(s.id).second) fail(line_no, "duplicate id " + s.id);
        b.samples.push_back(std::move(s));
    }
    return b;
}

std::string serialize_benchmark(const Benchmark& b) {
    std::string out;
    ordered_json header;
    header["demand"] = {{"name", b.demand.name}, {"text", b.demand.text}, {"option_count", b.demand.option_count}};
    header["generator_id"] = b.generator_id;
    header["created_at"] = format_utc(b.created_at);
    header["usage"] = usage_to_json(b.usage);
    out += header.dump() + "\n";
    for (const auto& s : b.samples) out += sample_to_json(s).dump() + "\n";
    return out;
}

Benchmark read_benchmark(const std::filesystem::path& path) { return parse_benchmark(read_file(path)); }

void write_benchmark(const Benchmark& b, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_benchmark(b));
}

std::string serialize_open_text(const std::vector<OpenTextItem>& items) {
    std::string out;
    for (const auto& item : items) {
        ordered_json j;
        j["question"] = item.question;
        j["reference_solution"] = item.reference_solution;
        j["reference_answer"] = item.reference_answer;
        out += j.dump() + "\n";
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os << content;
        if (!os.flush()) throw Error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace benchgen
