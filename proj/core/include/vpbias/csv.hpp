#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vpbias::csv {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
  std::vector<bool> quoted;  // per field: opened with a quote, so kept verbatim
};

/// Reads comma-separated records with RFC 4180 quoting. A trailing CR is
/// stripped; blank lines are skipped. Throws MalformedCsv on an unterminated
/// quote.
std::vector<Record> read(std::istream& in);

/// Quotes a field only when it contains a comma, quote or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

/// Strict full-string parse of a finite real; surrounding blanks are ignored.
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace vpbias::csv
