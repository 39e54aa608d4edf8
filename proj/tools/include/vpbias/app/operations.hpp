#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpbias/analytics.hpp"
#include "vpbias/bias.hpp"
#include "vpbias/complexity.hpp"
#include "vpbias/extension.hpp"
#include "vpbias/sampling.hpp"

// JSON-producing operations shared by the CLI and the HTTP service, so both
// front ends emit identical documents for identical inputs.
namespace vpbias::app {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct BiasSettings {
  BiasMetricConfig metric;
  AggregationSpec aggregation;
  DistributionOptions distribution;
  unsigned threads = 0;
};

/// Builds settings from textual flag values. Throws InvalidConfig or
/// InvalidAggregation on unknown names.
BiasSettings make_settings(const std::string& metric, double w, bool normalize, const std::string& agg,
                           const std::map<std::string, double>& weights, const std::vector<std::string>& dims,
                           bool missing_as_category, unsigned threads = 0);

json to_json(const BiasMetricConfig& cfg);
json to_json(const AggregationSpec& agg);
json to_json(const BiasReport& report);
json to_json(const Distribution& dist);
json to_json(const KsResult& ks);
json to_json(const RandomBaseline& baseline);
json to_json(const ExtensionCandidate& candidate);

/// Finite doubles as numbers, anything else as null.
json number_or_null(double value);
json asn_array(const AsnSet& asns);
json asn_array(const std::vector<Asn>& asns);
json trajectory_json(const std::vector<TrajectoryPoint>& trajectory);

/// [{dimension, score}] in schema order.
json radar_json(const BiasReport& report);

json bias_json(const FeatureTable& table, const AsnSet& population, const AsnSet& sample,
               const BiasSettings& settings);

json ks_json(const FeatureTable& table, const AsnSet& population, const AsnSet& sample,
             const BiasSettings& settings);

/// {population, sample} distributions for one dimension.
json distribution_pair_json(const FeatureTable& table, const AsnSet& population, const AsnSet& sample,
                            const std::string& dimension, const BiasSettings& settings);

json subsample_json(const FeatureTable& table, const AsnSet& population, const AsnSet& vantage_points,
                    std::size_t k, SubsampleAlgorithm algorithm, bool early_exit, const BiasSettings& settings);

struct ExtendRequest {
  std::size_t n = 0;
  SubsampleAlgorithm algorithm = SubsampleAlgorithm::Sorting;
  ExtensionOptions options;
};

/// Ranking plus the n-step extension. Candidates default to population \ V.
json extend_json(const FeatureTable& table, const AsnSet& population, const AsnSet& vantage_points,
                 const std::optional<AsnSet>& candidates, const ExtendRequest& request, const BiasSettings& settings);

json baseline_json(const FeatureTable& table, const AsnSet& population, const AsnSet& source,
                   const std::vector<std::size_t>& sizes, std::size_t iterations, std::uint64_t seed,
                   const BiasSettings& settings);

/// Canonical text form: keys sorted, no whitespace.
std::string canonical(const json& doc);

}  // namespace vpbias::app
