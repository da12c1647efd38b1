#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace safe {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);

// Lowercased alphanumeric runs; everything else separates.
std::vector<std::string> word_tokens(std::string_view s);

bool starts_with_icase(std::string_view s, std::string_view prefix);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// 64-bit FNV-1a. Stable across platforms, used wherever a string picks a seed.
std::uint64_t fnv1a64(std::string_view s);

}  // namespace safe
