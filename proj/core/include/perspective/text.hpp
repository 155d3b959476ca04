#pragma once

#include <string>
#include <string_view>
#include <vector>

// Text normalization shared by corpus cleaning and the tokenizer.
namespace persp::text {

std::string to_lower(std::string_view s);

// Replaces every http:// or https:// run (up to the next whitespace) with a space.
std::string strip_urls(std::string_view s);

// Collapses runs of whitespace to one space and trims both ends.
std::string collapse_whitespace(std::string_view s);

// Drops leading retweet markers of the form "rt @user:" (case-insensitive input expected lowered).
std::string strip_retweet_prefix(std::string_view s);

// Canonical key for duplicate detection.
std::string dedup_key(std::string_view s);

// Lowercased unigrams: URLs and @mentions removed, split on anything that is
// not alphanumeric, '#', or a non-ASCII byte; leading '#' stripped.
std::vector<std::string> tokens(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace persp::text
