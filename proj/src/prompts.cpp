#include "benchgen/prompts.hpp"

#include <fstream>
#include <sstream>

#include "benchgen/error.hpp"
#include "benchgen/text.hpp"
#include "embedded_prompts.hpp"

namespace benchgen::prompts {

std::string render(std::string_view tmpl, const Vars& vars) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const std::size_t open = tmpl.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        const std::size_t close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        out.append(tmpl.substr(pos, open - pos));
        const std::string_view name = tmpl.substr(open + 2, close - open - 2);
        if (auto it = vars.find(name); it != vars.end()) {
            out.append(it->second);
        } else {
            out.append(tmpl.substr(open, close + 2 - open));
        }
        pos = close + 2;
    }
    return out;
}

Library Library::builtin() {
    Library lib;
    for (const auto& [name, body] : embedded::prompt_files()) lib.templates_.emplace(name, body);
    return lib;
}

Library Library::with_overrides(const std::filesystem::path& dir) {
    Library lib = builtin();
    if (!std::filesystem::is_directory(dir)) throw ConfigError("assets directory not found: " + dir.string());
    for (auto& [name, body] : lib.templates_) {
        const auto file = dir / (name + ".txt");
        if (!std::filesystem::exists(file)) continue;
        std::ifstream is(file, std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        body = ss.str();
    }
    return lib;
}

const std::string& Library::get(std::string_view name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw ConfigError("unknown prompt template: " + std::string(name));
    return it->second;
}

std::string Library::difficulty_level(int level) const {
    const std::string prefix = "Level " + std::to_string(level) + ":";
    for (std::string_view line : text::split_lines(get(kDifficultyLevels))) {
        if (line.starts_with(prefix)) return std::string(text::trim(line));
    }
    throw ConfigError("difficulty level " + std::to_string(level) + " not described");
}

}  // namespace benchgen::prompts
