#include "perspective/text.hpp"

#include <cctype>

namespace persp::text {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_word(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0 || c == '_';
}

bool is_token_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0 || c == '#';
}

bool starts_url(std::string_view s, std::size_t pos) {
  auto rest = s.substr(pos);
  auto lower_prefix = [&](std::string_view p) {
    if (rest.size() < p.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(rest[i])) != p[i]) return false;
    }
    return true;
  };
  return lower_prefix("http://") || lower_prefix("https://");
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string strip_urls(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (starts_url(s, i)) {
      while (i < s.size() && !is_space(s[i])) ++i;
      out.push_back(' ');
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

std::string strip_retweet_prefix(std::string_view s) {
  for (;;) {
    std::size_t i = 0;
    while (i < s.size() && is_space(s[i])) ++i;
    if (s.substr(i, 2) != "rt") break;
    std::size_t j = i + 2;
    if (j >= s.size() || !is_space(s[j])) break;
    while (j < s.size() && is_space(s[j])) ++j;
    if (j >= s.size() || s[j] != '@') break;
    ++j;
    std::size_t name_start = j;
    while (j < s.size() && is_word(s[j])) ++j;
    if (j == name_start) break;
    if (j < s.size() && s[j] == ':') ++j;
    s = s.substr(j);
  }
  return std::string(s);
}

std::string dedup_key(std::string_view s) {
  return collapse_whitespace(strip_urls(strip_retweet_prefix(collapse_whitespace(to_lower(s)))));
}

std::vector<std::string> tokens(std::string_view raw) {
  const std::string s = strip_urls(to_lower(raw));
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '@' && (i == 0 || !is_token_char(s[i - 1]))) {
      ++i;
      while (i < s.size() && is_word(s[i])) ++i;
      continue;
    }
    if (!is_token_char(s[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < s.size() && is_token_char(s[i])) ++i;
    std::string_view tok(s.data() + start, i - start);
    while (!tok.empty() && tok.front() == '#') tok.remove_prefix(1);
    if (!tok.empty()) out.emplace_back(tok);
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace persp::text
