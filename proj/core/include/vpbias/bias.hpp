#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vpbias/distribution.hpp"
#include "vpbias/metrics.hpp"

namespace vpbias {

enum class AggregationMode { Mean, WeightedMean, Max, SubsetMean };

std::string_view to_string(AggregationMode mode) noexcept;
std::optional<AggregationMode> parse_aggregation_mode(std::string_view text);

struct AggregationSpec {
  AggregationMode mode = AggregationMode::Mean;
  std::map<std::string, double> weights;  // WeightedMean; absent dimensions weigh 0
  std::vector<std::string> subset;        // SubsetMean

  /// Throws InvalidAggregation: negative or all-zero weights, empty subset,
  /// or names outside the schema.
  void validate(const Schema& schema) const;

  friend bool operator==(const AggregationSpec&, const AggregationSpec&) = default;
};

/// Collapses per-dimension scores (null = no data) to one number. Null scores
/// never take part. Throws NoAggregatableDimension when nothing is in scope.
double aggregate_scores(const Schema& schema, std::span<const std::optional<double>> scores,
                        const AggregationSpec& spec);

struct BiasReport {
  std::vector<std::string> dimensions;            // schema order
  std::vector<std::optional<double>> per_dimension;
  std::optional<double> aggregate;  // null when no dimension is aggregatable
  BiasMetricConfig metric_config;
  AggregationSpec aggregation;
  std::size_t sample_outside_population = 0;

  std::optional<double> score(std::string_view dimension) const;
};

/// Per-dimension bias of `sample` against `population`: bins are built on the
/// population, P and Q compared with the configured metric. Dimensions where
/// either side has no data get a null score. Throws EmptyPopulation or
/// EmptySample.
BiasReport bias_vector(const FeatureTable& table, const AsnSet& population, const AsnSet& sample,
                       const BiasMetricConfig& cfg = {}, const AggregationSpec& agg = {},
                       const DistributionOptions& options = {});

double aggregate(const BiasReport& report, const AggregationSpec& spec);

/// One KS result per dimension in schema order; null where either side has
/// no data.
std::vector<std::pair<std::string, std::optional<KsResult>>> ks_vector(
    const FeatureTable& table, const AsnSet& population, const AsnSet& sample,
    const DistributionOptions& options = {});

}  // namespace vpbias
