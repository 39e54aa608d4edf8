#include "vpbias/bias.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vpbias/error.hpp"

namespace vpbias {

std::string_view to_string(AggregationMode mode) noexcept {
  switch (mode) {
    case AggregationMode::Mean: return "mean";
    case AggregationMode::WeightedMean: return "weighted";
    case AggregationMode::Max: return "max";
    case AggregationMode::SubsetMean: return "subset";
  }
  return "mean";
}

std::optional<AggregationMode> parse_aggregation_mode(std::string_view text) {
  if (text == "mean") return AggregationMode::Mean;
  if (text == "weighted") return AggregationMode::WeightedMean;
  if (text == "max") return AggregationMode::Max;
  if (text == "subset") return AggregationMode::SubsetMean;
  return std::nullopt;
}

void AggregationSpec::validate(const Schema& schema) const {
  auto known = [&](const std::string& name) {
    return std::any_of(schema.begin(), schema.end(), [&](const auto& d) { return d.name == name; });
  };
  if (mode == AggregationMode::WeightedMean) {
    double total = 0.0;
    for (const auto& [name, w] : weights) {
      if (!known(name)) throw Error(ErrorCode::InvalidAggregation, "weight for unknown dimension `" + name + "`");
      if (!(w >= 0.0) || !std::isfinite(w))
        throw Error(ErrorCode::InvalidAggregation, "weight for `" + name + "` must be a non-negative number");
      total += w;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidAggregation, "weights must sum to a positive value");
  }
  if (mode == AggregationMode::SubsetMean) {
    if (subset.empty()) throw Error(ErrorCode::InvalidAggregation, "subset aggregation needs at least one dimension");
    for (const auto& name : subset)
      if (!known(name)) throw Error(ErrorCode::InvalidAggregation, "unknown subset dimension `" + name + "`");
  }
}

double aggregate_scores(const Schema& schema, std::span<const std::optional<double>> scores,
                        const AggregationSpec& spec) {
  double sum = 0.0;
  double weight_sum = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t used = 0;

  for (std::size_t d = 0; d < schema.size() && d < scores.size(); ++d) {
    if (!scores[d]) continue;
    const double s = *scores[d];
    switch (spec.mode) {
      case AggregationMode::Mean:
        sum += s;
        ++used;
        break;
      case AggregationMode::Max:
        best = std::max(best, s);
        ++used;
        break;
      case AggregationMode::WeightedMean: {
        auto it = spec.weights.find(schema[d].name);
        if (it == spec.weights.end() || it->second <= 0.0) break;
        sum += it->second * s;
        weight_sum += it->second;
        ++used;
        break;
      }
      case AggregationMode::SubsetMean:
        if (std::find(spec.subset.begin(), spec.subset.end(), schema[d].name) == spec.subset.end()) break;
        sum += s;
        ++used;
        break;
    }
  }
  if (used == 0) throw Error(ErrorCode::NoAggregatableDimension, "no dimension with data is in aggregation scope");
  switch (spec.mode) {
    case AggregationMode::Max: return best;
    case AggregationMode::WeightedMean: return sum / weight_sum;
    default: return sum / static_cast<double>(used);
  }
}

std::optional<double> BiasReport::score(std::string_view dimension) const {
  for (std::size_t d = 0; d < dimensions.size(); ++d)
    if (dimensions[d] == dimension) return per_dimension[d];
  return std::nullopt;
}

BiasReport bias_vector(const FeatureTable& table, const AsnSet& population, const AsnSet& sample,
                       const BiasMetricConfig& cfg, const AggregationSpec& agg, const DistributionOptions& options) {
  if (population.empty()) throw Error(ErrorCode::EmptyPopulation, "population is empty");
  if (sample.empty()) throw Error(ErrorCode::EmptySample, "sample is empty");
  cfg.validate();
  agg.validate(table.schema());

  BiasReport report;
  report.metric_config = cfg;
  report.aggregation = agg;
  for (Asn asn : sample)
    if (!population.contains(asn)) ++report.sample_outside_population;

  for (const auto& dim : table.schema()) {
    report.dimensions.push_back(dim.name);
    std::optional<double> value;
    try {
      const auto bins = build_binning(table, population, dim.name, options);
      const auto p = empirical_distribution(table, population, bins);
      const auto q = empirical_distribution(table, sample, bins);
      value = score(p, q, cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoData) throw;
    }
    report.per_dimension.push_back(value);
  }
  try {
    report.aggregate = aggregate_scores(table.schema(), report.per_dimension, agg);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoAggregatableDimension) throw;
  }
  return report;
}

double aggregate(const BiasReport& report, const AggregationSpec& spec) {
  Schema names;
  names.reserve(report.dimensions.size());
  for (const auto& name : report.dimensions) names.push_back({.name = name});
  return aggregate_scores(names, report.per_dimension, spec);
}

std::vector<std::pair<std::string, std::optional<KsResult>>> ks_vector(const FeatureTable& table,
                                                                       const AsnSet& population,
                                                                       const AsnSet& sample,
                                                                       const DistributionOptions& options) {
  if (population.empty()) throw Error(ErrorCode::EmptyPopulation, "population is empty");
  if (sample.empty()) throw Error(ErrorCode::EmptySample, "sample is empty");
  std::vector<std::pair<std::string, std::optional<KsResult>>> out;
  for (const auto& dim : table.schema()) {
    std::optional<KsResult> result;
    try {
      const auto bins = build_binning(table, population, dim.name, options);
      const auto p = empirical_distribution(table, population, bins);
      const auto q = empirical_distribution(table, sample, bins);
      result = ks_test(p, q, p.support_count, q.support_count);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoData) throw;
    }
    out.emplace_back(dim.name, result);
  }
  return out;
}

}  // namespace vpbias
