#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the parsers.
namespace semground::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, std::string_view sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
/// True when `phrase` occurs in `haystack` bounded by non-alphanumerics.
bool contains_phrase(std::string_view haystack, std::string_view phrase);
/// Lowercased word tokens; commas become their own token, other punctuation is dropped.
std::vector<std::string> tokenize(std::string_view s);

std::string sha256_hex(std::string_view data);
std::string base64_encode(std::string_view data);

}  // namespace semground::text
