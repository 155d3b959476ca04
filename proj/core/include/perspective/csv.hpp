#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace persp::csv {

struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// Splits one line. With sep == ',' double-quoted fields are honoured
// ("" escapes a quote); with '\t' fields are taken verbatim.
std::vector<std::string> split_line(std::string_view line, char sep, bool* ok = nullptr);

// Reads every non-blank line; strips a trailing '\r' and a leading UTF-8 BOM.
// Throws ParseError on unbalanced quotes.
std::vector<Record> read(std::istream& in, char sep, const std::string& source);

std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields, char sep = ',');

}  // namespace persp::csv
