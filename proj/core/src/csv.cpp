#include "perspective/csv.hpp"

#include "perspective/error.hpp"

namespace persp::csv {

std::vector<std::string> split_line(std::string_view line, char sep, bool* ok) {
  std::vector<std::string> fields;
  if (ok) *ok = true;
  if (sep != ',') {
    std::size_t start = 0;
    for (;;) {
      auto pos = line.find(sep, start);
      fields.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return fields;
  }

  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (c == sep) {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted && ok) *ok = false;
  fields.push_back(std::move(field));
  return fields;
}

std::vector<Record> read(std::istream& in, char sep, const std::string& source) {
  std::vector<Record> records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    bool ok = true;
    auto fields = split_line(line, sep, &ok);
    if (!ok) throw ParseError(source, number, "unterminated quoted field");
    records.push_back({number, std::move(fields)});
  }
  return records;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields, char sep) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << sep;
    out << (sep == ',' ? escape(fields[i]) : fields[i]);
  }
  out << '\n';
}

}  // namespace persp::csv
