#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace persp::report {

// Fixed-point rendering, e.g. fixed(0.4938, 3) == "0.494".
std::string fixed(double value, int decimals = 3);
std::string fixed_or(const std::optional<double>& value, int decimals = 3, const std::string& missing = "NA");

// Shortest decimal text that parses back to the same double.
std::string shortest(double value);

// count/total as a percentage rounded to one decimal: percent(62, 1120) == "5.5".
double percent_value(std::size_t count, std::size_t total);
std::string percent(std::size_t count, std::size_t total);

/// Column-aligned plain-text table. Cells that parse as numbers are
/// right-aligned, everything else left-aligned.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row);
  std::string render() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace persp::report
