#include "perspective/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "perspective/error.hpp"

namespace persp::report {
namespace {

bool looks_numeric(const std::string& s) {
  if (s.empty()) return false;
  double v = 0;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size()) return true;
  return s.back() == '%' && looks_numeric(s.substr(0, s.size() - 1));
}

}  // namespace

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string fixed_or(const std::optional<double>& value, int decimals, const std::string& missing) {
  return value ? fixed(*value, decimals) : missing;
}

std::string shortest(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

double percent_value(std::size_t count, std::size_t total) {
  if (total == 0) return 0.0;
  // Integer rounding keeps 0.05 boundaries exact.
  auto tenths = (2000 * static_cast<unsigned long long>(count) + total) / (2 * total);
  return static_cast<double>(tenths) / 10.0;
}

std::string percent(std::size_t count, std::size_t total) { return fixed(percent_value(count, total), 1); }

void TextTable::add_row(std::vector<std::string> row) {
  row.resize(std::max(row.size(), header_.size()));
  rows_.push_back(std::move(row));
}

std::string TextTable::render() const {
  std::size_t cols = header_.size();
  for (const auto& r : rows_) cols = std::max(cols, r.size());
  std::vector<std::size_t> width(cols, 0);
  std::vector<bool> numeric(cols, true);
  auto measure = [&](const std::vector<std::string>& r, bool is_header) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      width[c] = std::max(width[c], r[c].size());
      if (!is_header && !r[c].empty() && r[c] != "NA" && !looks_numeric(r[c])) numeric[c] = false;
    }
  };
  measure(header_, true);
  for (const auto& r : rows_) measure(r, false);

  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& r) {
    std::string line;
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string cell = c < r.size() ? r[c] : "";
      std::string pad(width[c] - cell.size(), ' ');
      if (c) line += "  ";
      line += numeric[c] && c > 0 ? pad + cell : cell + pad;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  };
  emit(header_);
  std::string rule;
  for (std::size_t c = 0; c < cols; ++c) {
    if (c) rule += "  ";
    rule += std::string(width[c], '-');
  }
  out << rule << '\n';
  for (const auto& r : rows_) emit(r);
  return out.str();
}

}  // namespace persp::report
