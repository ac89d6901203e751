#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "benchgen/core.hpp"
#include "benchgen/providers.hpp"

namespace benchgen::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Runs one command; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// SOURCE_DATE_EPOCH when set; otherwise the epoch for deterministic
// providers and the current time for live ones.
Timestamp creation_time(const Provider& provider);

}  // namespace benchgen::cli
