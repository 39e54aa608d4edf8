#include "vpbias/feature_table.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "embedded_data.hpp"
#include "vpbias/csv.hpp"
#include "vpbias/error.hpp"

namespace vpbias {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string at_line(std::size_t line) { return " (line " + std::to_string(line) + ")"; }

}  // namespace

std::optional<Asn> parse_asn(std::string_view text) {
  text = csv::trim(text);
  if (text.size() > 2 && (text[0] == 'A' || text[0] == 'a') && (text[1] == 'S' || text[1] == 's'))
    text.remove_prefix(2);
  if (text.empty()) return std::nullopt;
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
  if (value == 0 || value > UINT32_MAX) return std::nullopt;
  return Asn(static_cast<std::uint32_t>(value));
}

std::string to_string(Asn asn) { return std::to_string(asn.value()); }

std::string_view to_string(DimensionKind kind) noexcept {
  return kind == DimensionKind::Numerical ? "numerical" : "categorical";
}

std::string_view to_string(CategoryGroup group) noexcept {
  switch (group) {
    case CategoryGroup::Location: return "Location";
    case CategoryGroup::NetworkSize: return "NetworkSize";
    case CategoryGroup::Topology: return "Topology";
    case CategoryGroup::IxpRelated: return "IxpRelated";
    case CategoryGroup::NetworkType: return "NetworkType";
  }
  return "NetworkType";
}

std::optional<DimensionKind> parse_dimension_kind(std::string_view text) {
  const auto t = lower(csv::trim(text));
  if (t == "numerical" || t == "numeric") return DimensionKind::Numerical;
  if (t == "categorical") return DimensionKind::Categorical;
  return std::nullopt;
}

std::optional<CategoryGroup> parse_category_group(std::string_view text) {
  const auto t = lower(csv::trim(text));
  for (auto g : {CategoryGroup::Location, CategoryGroup::NetworkSize, CategoryGroup::Topology,
                 CategoryGroup::IxpRelated, CategoryGroup::NetworkType}) {
    if (t == lower(to_string(g))) return g;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Schema

void validate_schema(const Schema& schema) {
  std::unordered_set<std::string> seen;
  for (const auto& dim : schema) {
    if (dim.name.empty()) throw Error(ErrorCode::InvalidSchema, "dimension with empty name");
    if (dim.name == "asn") throw Error(ErrorCode::InvalidSchema, "`asn` is reserved for the row key");
    if (!seen.insert(dim.name).second)
      throw Error(ErrorCode::InvalidSchema, "duplicate dimension `" + dim.name + "`");
    if (dim.bin_count < 1)
      throw Error(ErrorCode::InvalidSchema, "dimension `" + dim.name + "` needs bin_count >= 1");
  }
}

Schema parse_schema(std::istream& in) {
  auto records = csv::read(in);
  if (records.empty()) throw Error(ErrorCode::MalformedCsv, "schema file is empty");
  const auto& header = records.front().fields;
  if (header.size() < 3 || csv::trim(header[0]) != "name" || csv::trim(header[1]) != "kind" ||
      csv::trim(header[2]) != "category")
    throw Error(ErrorCode::MalformedCsv, "schema header must be name,kind,category[,bin_count]");

  Schema schema;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size())
      throw Error(ErrorCode::MalformedCsv, "schema row arity mismatch" + at_line(rec.line));
    DimensionSchema dim;
    dim.name = std::string(csv::trim(rec.fields[0]));
    auto kind = parse_dimension_kind(rec.fields[1]);
    auto group = parse_category_group(rec.fields[2]);
    if (!kind || !group) throw Error(ErrorCode::InvalidSchema, "bad kind or category" + at_line(rec.line));
    dim.kind = *kind;
    dim.category = *group;
    if (rec.fields.size() > 3 && !csv::trim(rec.fields[3]).empty()) {
      auto bins = csv::parse_double(rec.fields[3]);
      if (!bins || *bins != static_cast<int>(*bins))
        throw Error(ErrorCode::InvalidSchema, "bin_count must be an integer" + at_line(rec.line));
      dim.bin_count = static_cast<int>(*bins);
    }
    schema.push_back(std::move(dim));
  }
  validate_schema(schema);
  return schema;
}

Schema load_schema(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_schema(in);
}

void write_schema(const Schema& schema, std::ostream& out) {
  csv::write_row(out, {"name", "kind", "category", "bin_count"});
  for (const auto& dim : schema) {
    csv::write_row(out, {dim.name, std::string(to_string(dim.kind)), std::string(to_string(dim.category)),
                         dim.kind == DimensionKind::Numerical ? std::to_string(dim.bin_count) : ""});
  }
}

const Schema& default_schema() {
  static const Schema schema = [] {
    std::istringstream in(detail::kDefaultSchemaCsv);
    return parse_schema(in);
  }();
  return schema;
}

// ---------------------------------------------------------------------------
// FeatureTable

FeatureTable::FeatureTable(Schema schema, std::vector<Row> rows) : schema_(std::move(schema)) {
  validate_schema(schema_);
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first == rows[i - 1].first)
      throw Error(ErrorCode::DuplicateAsn, "duplicate ASN " + to_string(rows[i].first));
  }

  columns_.assign(schema_.size(), {});
  for (auto& col : columns_) col.reserve(rows.size());
  asns_.reserve(rows.size());
  row_of_.reserve(rows.size());

  for (auto& [asn, cells] : rows) {
    if (asn.value() == 0) throw Error(ErrorCode::MalformedInput, "ASN 0 is not valid");
    if (cells.size() != schema_.size())
      throw Error(ErrorCode::MalformedCsv, "row for ASN " + to_string(asn) + " has " +
                                               std::to_string(cells.size()) + " cells, expected " +
                                               std::to_string(schema_.size()));
    for (std::size_t d = 0; d < schema_.size(); ++d) {
      auto& cell = cells[d];
      if (schema_[d].kind == DimensionKind::Numerical) {
        if (std::holds_alternative<std::string>(cell) ||
            (std::holds_alternative<double>(cell) && !std::isfinite(std::get<double>(cell))))
          throw Error(ErrorCode::TypeMismatch,
                      "non-numeric value in numerical column `" + schema_[d].name + "` for ASN " + to_string(asn));
      } else {
        if (std::holds_alternative<double>(cell))
          throw Error(ErrorCode::TypeMismatch,
                      "number in categorical column `" + schema_[d].name + "` for ASN " + to_string(asn));
        if (auto* token = std::get_if<std::string>(&cell); token && token->empty()) cell = std::monostate{};
      }
      columns_[d].push_back(std::move(cell));
    }
    row_of_.emplace(asn, asns_.size());
    asns_.push_back(asn);
  }
}

AsnSet FeatureTable::asn_set() const { return AsnSet(asns_.begin(), asns_.end()); }

std::optional<std::size_t> FeatureTable::row_index(Asn asn) const {
  auto it = row_of_.find(asn);
  if (it == row_of_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FeatureTable::dimension_index(std::string_view name) const {
  for (std::size_t d = 0; d < schema_.size(); ++d)
    if (schema_[d].name == name) return d;
  return std::nullopt;
}

std::size_t FeatureTable::require_dimension(std::string_view name) const {
  auto d = dimension_index(name);
  if (!d) throw Error(ErrorCode::UnknownDimension, "unknown dimension `" + std::string(name) + "`");
  return *d;
}

FeatureTable parse_feature_table(std::istream& in, const std::optional<Schema>& schema) {
  auto records = csv::read(in);
  if (records.empty()) throw Error(ErrorCode::MalformedCsv, "feature table is empty");
  const auto& header = records.front().fields;
  if (header.empty() || csv::trim(header[0]) != "asn")
    throw Error(ErrorCode::MalformedCsv, "first column of the feature table must be `asn`");

  std::vector<std::string> names;
  for (std::size_t c = 1; c < header.size(); ++c) names.emplace_back(csv::trim(header[c]));
  const std::size_t width = header.size();
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].fields.size() != width)
      throw Error(ErrorCode::MalformedCsv, "expected " + std::to_string(width) + " fields, got " +
                                               std::to_string(records[r].fields.size()) + at_line(records[r].line));
  }

  Schema resolved;
  if (schema) {
    if (schema->size() != names.size())
      throw Error(ErrorCode::MalformedCsv, "header has " + std::to_string(names.size()) +
                                               " dimensions, schema has " + std::to_string(schema->size()));
    for (const auto& name : names) {
      auto it = std::find_if(schema->begin(), schema->end(), [&](const auto& d) { return d.name == name; });
      if (it == schema->end())
        throw Error(ErrorCode::MalformedCsv, "column `" + name + "` is not in the schema");
      resolved.push_back(*it);
    }
  } else {
    for (std::size_t c = 0; c < names.size(); ++c) {
      bool numeric = true;
      for (std::size_t r = 1; r < records.size() && numeric; ++r) {
        auto text = csv::trim(records[r].fields[c + 1]);
        if (!text.empty() && !csv::parse_double(text)) numeric = false;
      }
      DimensionSchema dim;
      dim.name = names[c];
      dim.kind = numeric ? DimensionKind::Numerical : DimensionKind::Categorical;
      const auto& defaults = default_schema();
      auto it = std::find_if(defaults.begin(), defaults.end(), [&](const auto& d) { return d.name == dim.name; });
      if (it != defaults.end()) {
        dim.category = it->category;
        dim.bin_count = it->bin_count;
      }
      resolved.push_back(std::move(dim));
    }
  }
  validate_schema(resolved);

  std::vector<FeatureTable::Row> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    auto asn = parse_asn(rec.fields[0]);
    if (!asn) throw Error(ErrorCode::MalformedCsv, "invalid ASN `" + rec.fields[0] + "`" + at_line(rec.line));
    std::vector<Cell> cells;
    cells.reserve(resolved.size());
    for (std::size_t c = 0; c < resolved.size(); ++c) {
      const bool verbatim = rec.quoted[c + 1] && resolved[c].kind == DimensionKind::Categorical;
      auto text = verbatim ? std::string_view(rec.fields[c + 1]) : csv::trim(rec.fields[c + 1]);
      if (text.empty()) {
        cells.emplace_back(std::monostate{});
      } else if (resolved[c].kind == DimensionKind::Numerical) {
        auto value = csv::parse_double(text);
        if (!value)
          throw Error(ErrorCode::TypeMismatch, "non-numeric value `" + std::string(text) + "` in column `" +
                                                   resolved[c].name + "`" + at_line(rec.line));
        cells.emplace_back(*value);
      } else {
        cells.emplace_back(std::string(text));
      }
    }
    rows.emplace_back(*asn, std::move(cells));
  }
  return FeatureTable(std::move(resolved), std::move(rows));
}

FeatureTable load_feature_table(const std::filesystem::path& path, const std::optional<Schema>& schema) {
  auto in = open_input(path);
  return parse_feature_table(in, schema);
}

void write_feature_table(const FeatureTable& table, std::ostream& out) {
  std::vector<std::string> fields{"asn"};
  for (const auto& dim : table.schema()) fields.push_back(dim.name);
  csv::write_row(out, fields);
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    fields.assign(1, to_string(table.asns()[r]));
    for (std::size_t d = 0; d < table.num_dimensions(); ++d) {
      const auto& cell = table.cell(r, d);
      if (auto* x = std::get_if<double>(&cell))
        fields.push_back(csv::format_double(*x));
      else if (auto* s = std::get_if<std::string>(&cell))
        fields.push_back(*s);
      else
        fields.emplace_back();
    }
    csv::write_row(out, fields);
  }
}

// ---------------------------------------------------------------------------
// Vantage-point sets

std::vector<Asn> parse_asn_list(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);

  std::size_t first = 0;
  while (first < lines.size()) {
    auto t = csv::trim(lines[first]);
    if (!t.empty() && t.front() != '#') break;
    ++first;
  }
  std::vector<Asn> asns;
  if (first == lines.size()) return asns;

  // CSV with a header naming an `asn` column.
  if (!parse_asn(lines[first])) {
    std::string rest;
    for (std::size_t i = first; i < lines.size(); ++i) rest += lines[i] + "\n";
    std::istringstream csv_in(rest);
    auto records = csv::read(csv_in);
    const auto& header = records.front().fields;
    auto col = std::find_if(header.begin(), header.end(), [](const auto& h) { return csv::trim(h) == "asn"; });
    if (col == header.end())
      throw Error(ErrorCode::MalformedInput, "VP set file is neither an ASN list nor a CSV with an `asn` column");
    const auto index = static_cast<std::size_t>(col - header.begin());
    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& rec = records[r];
      if (rec.fields.size() != header.size())
        throw Error(ErrorCode::MalformedInput, "VP set CSV arity mismatch" + at_line(first + rec.line));
      auto asn = parse_asn(rec.fields[index]);
      if (!asn)
        throw Error(ErrorCode::MalformedInput,
                    "invalid ASN `" + rec.fields[index] + "`" + at_line(first + rec.line));
      asns.push_back(*asn);
    }
    return asns;
  }

  for (std::size_t i = first; i < lines.size(); ++i) {
    auto t = csv::trim(lines[i]);
    if (t.empty() || t.front() == '#') continue;
    auto asn = parse_asn(t);
    if (!asn) throw Error(ErrorCode::MalformedInput, "invalid ASN `" + std::string(t) + "`" + at_line(i + 1));
    asns.push_back(*asn);
  }
  return asns;
}

ResolvedSet resolve_set(std::string name, std::span<const Asn> asns, const FeatureTable& table) {
  ResolvedSet out;
  out.set.name = std::move(name);
  AsnSet unresolved;
  for (Asn asn : asns) {
    if (table.contains(asn))
      out.set.members.insert(asn);
    else
      unresolved.insert(asn);
  }
  out.unresolved.assign(unresolved.begin(), unresolved.end());
  if (out.set.members.empty())
    throw Error(ErrorCode::EmptySet, "VP set `" + out.set.name + "` has no ASN present in the feature table");
  return out;
}

ResolvedSet load_vantage_point_set(const std::filesystem::path& path, const FeatureTable& table) {
  auto in = open_input(path);
  auto asns = parse_asn_list(in);
  return resolve_set(path.stem().string(), asns, table);
}

// ---------------------------------------------------------------------------
// Labels

std::vector<LabelAssignment> parse_labels(std::istream& in) {
  auto records = csv::read(in);
  if (records.empty()) throw Error(ErrorCode::MalformedCsv, "label file is empty");
  const auto& header = records.front().fields;
  if (header.size() != 2 || csv::trim(header[0]) != "asn" || csv::trim(header[1]) != "label")
    throw Error(ErrorCode::MalformedCsv, "label file header must be `asn,label`");

  std::map<Asn, std::set<std::string>> grouped;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 2) throw Error(ErrorCode::MalformedCsv, "label row arity mismatch" + at_line(rec.line));
    auto asn = parse_asn(rec.fields[0]);
    if (!asn) throw Error(ErrorCode::MalformedCsv, "invalid ASN `" + rec.fields[0] + "`" + at_line(rec.line));
    auto label = csv::trim(rec.fields[1]);
    if (label.empty()) throw Error(ErrorCode::MalformedCsv, "empty label" + at_line(rec.line));
    grouped[*asn].emplace(label);
  }
  std::vector<LabelAssignment> out;
  out.reserve(grouped.size());
  for (auto& [asn, labels] : grouped) out.push_back({asn, std::move(labels)});
  return out;
}

std::vector<LabelAssignment> load_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_labels(in);
}

}  // namespace vpbias
