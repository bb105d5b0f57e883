#pragma once

#include <string>
#include <vector>

namespace wdro::io {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180 style: fields holding a comma, quote or line break are quoted,
// quotes doubled; rows end with '\n'. parse_csv(write_csv(t)) == t and
// write_csv(parse_csv(s)) == s for any s produced by write_csv.
std::string write_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

// Shortest decimal form that reads back to the same double.
std::string format_number(double value);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace wdro::io
