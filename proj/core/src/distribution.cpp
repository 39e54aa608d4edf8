#include "vpbias/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "vpbias/error.hpp"

namespace vpbias {

namespace {

// Linear interpolation between order statistics at fraction num/den.
double interpolated_quantile(const std::vector<double>& sorted, std::size_t num, std::size_t den) {
  const double h = static_cast<double>(sorted.size() - 1) * static_cast<double>(num) / static_cast<double>(den);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::size_t member_row(const FeatureTable& table, Asn asn) {
  auto row = table.row_index(asn);
  if (!row) throw Error(ErrorCode::UnknownAsn, "ASN " + to_string(asn) + " is not in the feature table");
  return *row;
}

}  // namespace

std::size_t BinningSpec::regular_bins() const noexcept {
  if (kind == DimensionKind::Categorical) return categories.size();
  return edges.size() < 2 ? 0 : edges.size() - 1;
}

std::optional<std::size_t> BinningSpec::bin_of(const Cell& cell) const {
  if (is_missing(cell)) {
    if (missing_bin) return regular_bins();
    return std::nullopt;
  }
  if (kind == DimensionKind::Numerical) {
    const auto* x = std::get_if<double>(&cell);
    if (!x || edges.size() < 2) return std::nullopt;
    // Interior edges edges[1..n-2]; the bin index is how many of them are <= x.
    auto first = edges.begin() + 1;
    auto last = edges.end() - 1;
    return static_cast<std::size_t>(std::upper_bound(first, last, *x) - first);
  }
  const auto* token = std::get_if<std::string>(&cell);
  if (!token) return std::nullopt;
  auto it = std::lower_bound(categories.begin(), categories.end(), *token);
  if (it != categories.end() && *it == *token) return static_cast<std::size_t>(it - categories.begin());
  return other_index();
}

BinningSpec build_binning(const FeatureTable& table, const AsnSet& population, std::string_view dimension,
                          const DistributionOptions& options) {
  if (population.empty()) throw Error(ErrorCode::EmptyPopulation, "population is empty");
  const std::size_t d = table.require_dimension(dimension);
  const auto& schema = table.schema()[d];

  BinningSpec spec;
  spec.dimension = schema.name;
  spec.kind = schema.kind;
  spec.missing_bin = options.missing_as_category;

  if (schema.kind == DimensionKind::Categorical) {
    std::set<std::string> tokens;
    for (Asn asn : population) {
      if (const auto* s = std::get_if<std::string>(&table.cell(member_row(table, asn), d))) tokens.insert(*s);
    }
    if (tokens.empty())
      throw Error(ErrorCode::NoData, "no population value for dimension `" + spec.dimension + "`");
    spec.categories.assign(tokens.begin(), tokens.end());
    return spec;
  }

  std::vector<double> values;
  values.reserve(population.size());
  for (Asn asn : population) {
    if (const auto* x = std::get_if<double>(&table.cell(member_row(table, asn), d))) values.push_back(*x);
  }
  if (values.empty()) throw Error(ErrorCode::NoData, "no population value for dimension `" + spec.dimension + "`");
  std::sort(values.begin(), values.end());

  const auto bins = static_cast<std::size_t>(std::max(1, schema.bin_count));
  for (std::size_t j = 0; j <= bins; ++j) {
    const double edge = interpolated_quantile(values, j, bins);
    if (spec.edges.empty() || edge > spec.edges.back()) spec.edges.push_back(edge);
  }
  if (spec.edges.size() == 1) spec.edges.push_back(spec.edges.front());
  return spec;
}

Distribution distribution_from_counts(const BinningSpec& bins, std::span<const std::int64_t> counts) {
  std::int64_t support = 0;
  for (auto c : counts) support += c;
  if (support == 0) throw Error(ErrorCode::NoData, "no data for dimension `" + bins.dimension + "`");

  Distribution dist;
  dist.dimension = bins.dimension;
  dist.bins = bins;
  dist.support_count = support;
  std::size_t cells = bins.bin_count();
  if (counts.size() > cells && counts[cells] > 0) ++cells;
  dist.probs.resize(cells);
  for (std::size_t i = 0; i < cells; ++i)
    dist.probs[i] = static_cast<double>(counts[i]) / static_cast<double>(support);
  return dist;
}

Distribution empirical_distribution(const FeatureTable& table, const AsnSet& members, const BinningSpec& bins) {
  if (members.empty()) throw Error(ErrorCode::EmptySample, "member set is empty");
  const std::size_t d = table.require_dimension(bins.dimension);
  std::vector<std::int64_t> counts(bins.bin_count() + 1, 0);
  for (Asn asn : members) {
    if (auto bin = bins.bin_of(table.cell(member_row(table, asn), d))) ++counts[*bin];
  }
  return distribution_from_counts(bins, counts);
}

}  // namespace vpbias
