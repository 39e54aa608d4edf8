#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "vpbias/asn.hpp"

namespace vpbias {

enum class DimensionKind { Numerical, Categorical };

enum class CategoryGroup { Location, NetworkSize, Topology, IxpRelated, NetworkType };

inline constexpr std::size_t kCategoryGroupCount = 5;

std::string_view to_string(DimensionKind kind) noexcept;
std::string_view to_string(CategoryGroup group) noexcept;
std::optional<DimensionKind> parse_dimension_kind(std::string_view text);
std::optional<CategoryGroup> parse_category_group(std::string_view text);

struct DimensionSchema {
  std::string name;
  DimensionKind kind = DimensionKind::Numerical;
  CategoryGroup category = CategoryGroup::NetworkType;
  int bin_count = 10;  // numerical only

  friend bool operator==(const DimensionSchema&, const DimensionSchema&) = default;
};

using Schema = std::vector<DimensionSchema>;

/// The 22 AS characteristics grouped into the five category groups. Backed by
/// the schema file shipped in core/data.
const Schema& default_schema();

/// Schema CSV: `name,kind,category[,bin_count]`.
Schema parse_schema(std::istream& in);
Schema load_schema(const std::filesystem::path& path);
void write_schema(const Schema& schema, std::ostream& out);

/// Throws InvalidSchema on duplicate names, empty names or bin_count < 1.
void validate_schema(const Schema& schema);

/// A single feature value: missing, a finite number, or a non-empty token.
using Cell = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const Cell& cell) { return std::holds_alternative<std::monostate>(cell); }

/// ASN-indexed table of mixed numerical/categorical characteristics. Rows are
/// kept in ascending ASN order; the table is immutable once constructed.
class FeatureTable {
 public:
  using Row = std::pair<Asn, std::vector<Cell>>;

  FeatureTable() = default;

  /// Validates arity, cell kinds and ASN uniqueness. Throws DuplicateAsn,
  /// MalformedCsv (arity) or TypeMismatch.
  FeatureTable(Schema schema, std::vector<Row> rows);

  const Schema& schema() const noexcept { return schema_; }
  std::size_t num_rows() const noexcept { return asns_.size(); }
  std::size_t num_dimensions() const noexcept { return schema_.size(); }

  std::span<const Asn> asns() const noexcept { return asns_; }
  AsnSet asn_set() const;

  std::optional<std::size_t> row_index(Asn asn) const;
  bool contains(Asn asn) const { return row_index(asn).has_value(); }
  std::optional<std::size_t> dimension_index(std::string_view name) const;

  /// Like dimension_index but throws UnknownDimension.
  std::size_t require_dimension(std::string_view name) const;

  const Cell& cell(std::size_t row, std::size_t dimension) const {
    return columns_[dimension][row];
  }
  std::span<const Cell> column(std::size_t dimension) const { return columns_[dimension]; }

  friend bool operator==(const FeatureTable&, const FeatureTable&) = default;

 private:
  Schema schema_;
  std::vector<Asn> asns_;
  std::vector<std::vector<Cell>> columns_;
  std::unordered_map<Asn, std::size_t> row_of_;
};

/// Reads a feature table CSV (header row, first column `asn`, empty cell =
/// missing). Without a schema, a column is numerical iff every non-empty cell
/// parses as a finite real; category groups come from the default schema when
/// the name matches and default to NetworkType otherwise.
FeatureTable parse_feature_table(std::istream& in, const std::optional<Schema>& schema = std::nullopt);
FeatureTable load_feature_table(const std::filesystem::path& path,
                                const std::optional<Schema>& schema = std::nullopt);
void write_feature_table(const FeatureTable& table, std::ostream& out);

struct VantagePointSet {
  std::string name;
  AsnSet members;
  std::map<std::string, std::string> metadata;
};

struct ResolvedSet {
  VantagePointSet set;
  std::vector<Asn> unresolved;  // listed but absent from the table, ascending
};

/// Newline-delimited ASNs (blank lines and `#` comments allowed) or a CSV with
/// an `asn` column. Throws MalformedInput.
std::vector<Asn> parse_asn_list(std::istream& in);

/// Splits `asns` into members present in `table` and unresolved ones. Throws
/// EmptySet when nothing resolves.
ResolvedSet resolve_set(std::string name, std::span<const Asn> asns, const FeatureTable& table);

ResolvedSet load_vantage_point_set(const std::filesystem::path& path, const FeatureTable& table);

struct LabelAssignment {
  Asn asn;
  std::set<std::string> labels;

  friend bool operator==(const LabelAssignment&, const LabelAssignment&) = default;
};

/// CSV with `asn,label` columns, one row per pair; grouped by ASN in ascending
/// order. Validation of label ids lives with the complexity score table.
std::vector<LabelAssignment> parse_labels(std::istream& in);
std::vector<LabelAssignment> load_labels(const std::filesystem::path& path);

}  // namespace vpbias
