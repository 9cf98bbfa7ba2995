#pragma once

#include <string>
#include <vector>

namespace painfair {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads a UTF-8 CSV file with a required header row. Quoted fields with
// embedded commas, quotes and newlines are supported (RFC 4180 style).
CsvTable read_csv_file(const std::string& path);

CsvTable parse_csv(const std::string& text, const std::string& origin);

// Quotes a field only when needed.
std::string csv_field(const std::string& value);

std::string csv_line(const std::vector<std::string>& fields);

}  // namespace painfair
