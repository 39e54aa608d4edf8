#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vpbias/feature_table.hpp"

namespace vpbias {

enum class AssociationMethod { Pearson, CorrelationRatio, CramersV };

std::string_view to_string(AssociationMethod method) noexcept;

struct CorrelationMatrix {
  std::vector<std::string> dimensions;
  std::vector<CategoryGroup> groups;
  std::vector<std::optional<double>> values;  // row-major D x D, in [0, 1] or null
  std::vector<AssociationMethod> methods;     // row-major D x D
  /// Mean association per category-group pair over distinct dimensions;
  /// indexed by CategoryGroup.
  std::array<std::array<std::optional<double>, kCategoryGroupCount>, kCategoryGroupCount> category_matrix{};

  std::size_t size() const noexcept { return dimensions.size(); }
  std::optional<double> value(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
  AssociationMethod method(std::size_t i, std::size_t j) const { return methods[i * size() + j]; }
};

/// |Pearson r|; null with fewer than 3 points or zero variance.
std::optional<double> abs_pearson(std::span<const double> x, std::span<const double> y);

/// sqrt(SS_between / SS_total) of `values` grouped by `groups`.
std::optional<double> correlation_ratio(std::span<const std::size_t> groups, std::span<const double> values);

/// Uncorrected Cramer's V: sqrt(chi2 / (n (min(r, c) - 1))).
std::optional<double> cramers_v(std::span<const std::size_t> a, std::span<const std::size_t> b);

/// Pairwise-complete association between every pair of dimensions over the
/// population rows. Throws EmptyPopulation.
CorrelationMatrix correlation_matrix(const FeatureTable& table, const AsnSet& population);

/// Percentile with linear interpolation between order statistics. `sorted`
/// must be ascending and non-empty; pct in [0, 100].
double percentile(std::span<const double> sorted, double pct);

/// Median latency per AS, milliseconds.
using LatencyDistribution = std::map<Asn, double>;

/// CSV with `asn,latency_ms`. Throws MalformedCsv or MalformedInput for
/// negative or non-finite latencies.
LatencyDistribution parse_latency(std::istream& in);
LatencyDistribution load_latency(const std::filesystem::path& path);

struct PercentileErrors {
  std::vector<int> percentiles;
  std::vector<double> ground_truth;             // L(pi)
  std::vector<double> estimate;                 // L_S(pi)
  std::vector<std::optional<double>> errors;    // |L_S/L - 1|, null where L = 0
  double mean_error = 0.0;                      // over non-null errors
  std::size_t estimate_size = 0;
};

/// Relative error per percentile between the distribution of all ground-truth
/// values and that of estimate_values restricted to estimate_members.
PercentileErrors percentile_relative_error(const LatencyDistribution& ground_truth, const AsnSet& estimate_members,
                                           const LatencyDistribution& estimate_values,
                                           std::span<const int> percentiles);

}  // namespace vpbias
