#pragma once

// Minimal RFC 4180 CSV: comma separated, double-quoted fields with ""
// escapes, LF or CRLF line ends, optional UTF-8 byte-order mark.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nnstat::io {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by header name, or -1.
  int column(const std::string& name) const;
};

// Throws InputError for an empty document, duplicate header names or rows
// whose field count differs from the header (the message gives the line).
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

// Quotes the field when it contains a comma, quote or line break.
std::string csv_field(const std::string& s);
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace nnstat::io
