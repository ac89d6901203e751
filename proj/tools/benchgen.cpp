#include <iostream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "benchgen/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args;
    bool quiet = false;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "-q" || a == "--quiet") {
            quiet = true;
        } else {
            args.push_back(a);
        }
    }
    auto logger = spdlog::stderr_color_mt("benchgen");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(quiet ? spdlog::level::err : spdlog::level::info);
    return benchgen::cli::run_cli(args, std::cout, std::cerr);
}
