#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cascadefuse {

inline constexpr std::string_view kUrlToken = "<url>";

/// Lowercased word tokens for space-delimited scripts, overlapping character
/// bigrams for Han runs (a lone Han character stays a unigram), and a single
/// sentinel token for each URL. Invalid UTF-8 bytes act as separators.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace cascadefuse
