#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace benchgen::text {

// Lowercases, splits on whitespace and punctuation (ASCII plus the common
// Unicode separator/punctuation blocks), drops empty tokens. Input is UTF-8;
// invalid byte sequences are treated as separators.
std::vector<std::string> tokenize(std::string_view input);

// Whitespace-delimited token count, used for usage estimates.
std::size_t whitespace_token_count(std::string_view input);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view s);

// 0 -> 'A', 1 -> 'B', ... Valid up to 25.
char option_letter(std::size_t index);
std::optional<std::size_t> letter_index(char letter);

// Case-insensitive ASCII substring search; npos when absent.
std::size_t find_ci(std::string_view haystack, std::string_view needle, std::size_t from = 0);
std::size_t rfind_ci(std::string_view haystack, std::string_view needle);

}  // namespace benchgen::text
