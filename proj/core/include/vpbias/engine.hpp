#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "vpbias/bias.hpp"

namespace vpbias {

/// Count-based bias evaluator for one (table, population, metric,
/// aggregation) setting.
///
/// Binning and the population distributions are computed once. A sample is
/// represented by per-dimension bin counts, so adding or removing a member
/// costs O(#dimensions) and re-scoring costs O(#bins). The scores produced are
/// bit-identical to bias_vector() followed by aggregate() on the same set.
class BiasEngine {
 public:
  struct Counts {
    std::vector<std::vector<std::int64_t>> bins;  // per dimension, bin_count()+1 cells
    std::vector<std::int64_t> support;            // per dimension
    std::size_t members = 0;
  };

  BiasEngine(const FeatureTable& table, const AsnSet& population, BiasMetricConfig cfg,
             AggregationSpec agg = {}, DistributionOptions options = {});

  const FeatureTable& table() const noexcept { return *table_; }
  const AsnSet& population() const noexcept { return population_; }
  const BiasMetricConfig& metric_config() const noexcept { return cfg_; }
  const AggregationSpec& aggregation() const noexcept { return agg_; }

  /// Binning for a dimension, nullopt when the population has no data there.
  const std::optional<BinningSpec>& binning(std::size_t dimension) const { return dims_[dimension].bins; }
  const std::vector<double>& population_probs(std::size_t dimension) const { return dims_[dimension].p; }

  /// Throws UnknownAsn.
  std::size_t row_of(Asn asn) const;

  Counts empty_counts() const;
  Counts counts_of(const AsnSet& members) const;
  void add(Counts& counts, std::size_t row) const;
  void remove(Counts& counts, std::size_t row) const;

  std::vector<std::optional<double>> scores(const Counts& counts) const;

  /// Aggregate bias, nullopt when no in-scope dimension has data.
  std::optional<double> try_bias(const Counts& counts) const;

  /// Throws NoAggregatableDimension instead of returning nullopt.
  double bias(const Counts& counts) const;
  double bias(const AsnSet& members) const { return bias(counts_of(members)); }

 private:
  struct Dim {
    std::optional<BinningSpec> bins;
    std::vector<double> p;              // bin_count()+1 cells, "other" = 0
    std::vector<std::int32_t> bin_of;   // per table row, -1 = excluded
    bool in_scope = true;
  };

  std::optional<double> dimension_score(std::size_t d, const Counts& counts, std::vector<double>& q) const;

  const FeatureTable* table_;
  AsnSet population_;
  BiasMetricConfig cfg_;
  AggregationSpec agg_;
  std::vector<Dim> dims_;
};

}  // namespace vpbias
