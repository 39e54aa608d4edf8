#include "vpbias/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <system_error>

#include "vpbias/error.hpp"

namespace vpbias::csv {

std::string_view trim(std::string_view text) {
  constexpr std::string_view kBlank = " \t\r\n";
  const auto first = text.find_first_not_of(kBlank);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(kBlank);
  return text.substr(first, last - first + 1);
}

std::vector<Record> read(std::istream& in) {
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  auto finish_field = [&] {
    current.fields.push_back(std::move(field));
    current.quoted.push_back(field_quoted);
    field.clear();
    field_quoted = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!in_quotes) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      current = Record{line_no, {}, {}};
      field.clear();
      field_quoted = false;
    } else {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      field.push_back('\n');
    }
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            in_quotes = false;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == '"') {
        in_quotes = true;
        field_quoted = true;
      } else if (c == ',') {
        finish_field();
      } else {
        field.push_back(c);
      }
    }
    if (!in_quotes) {
      finish_field();
      records.push_back(std::move(current));
    }
  }
  if (in_quotes)
    throw Error(ErrorCode::MalformedCsv,
                "unterminated quoted field starting on line " + std::to_string(current.line));
  return records;
}

std::string escape(std::string_view field) {
  const bool padded = !field.empty() && trim(field).size() != field.size();
  if (!padded && field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace vpbias::csv
