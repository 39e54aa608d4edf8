#include "vpbias/app/operations.hpp"

#include <algorithm>
#include <cmath>

#include "vpbias/error.hpp"

namespace vpbias::app {

BiasSettings make_settings(const std::string& metric, double w, bool normalize, const std::string& agg,
                           const std::map<std::string, double>& weights, const std::vector<std::string>& dims,
                           bool missing_as_category, unsigned threads) {
  BiasSettings s;
  auto m = parse_metric(metric);
  if (!m) throw Error(ErrorCode::InvalidConfig, "unknown metric `" + metric + "` (kl|tv|max)");
  s.metric.metric = *m;
  s.metric.smoothing_w = w;
  s.metric.normalize = normalize;
  s.metric.validate();

  auto mode = parse_aggregation_mode(agg);
  if (!mode) throw Error(ErrorCode::InvalidAggregation, "unknown aggregation `" + agg + "` (mean|max|weighted|subset)");
  s.aggregation.mode = *mode;
  if (*mode == AggregationMode::WeightedMean) s.aggregation.weights = weights;
  if (*mode == AggregationMode::SubsetMean) s.aggregation.subset = dims;
  s.distribution.missing_as_category = missing_as_category;
  s.threads = threads;
  return s;
}

json number_or_null(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

json to_json(const BiasMetricConfig& cfg) {
  return {{"metric", to_string(cfg.metric)}, {"normalize", cfg.normalize}, {"w", cfg.smoothing_w}};
}

json to_json(const AggregationSpec& agg) {
  json j = {{"mode", to_string(agg.mode)}};
  if (agg.mode == AggregationMode::WeightedMean) j["weights"] = agg.weights;
  if (agg.mode == AggregationMode::SubsetMean) j["subset"] = agg.subset;
  return j;
}

json to_json(const BiasReport& report) {
  json per = json::object();
  for (std::size_t d = 0; d < report.dimensions.size(); ++d)
    per[report.dimensions[d]] = report.per_dimension[d] ? json(*report.per_dimension[d]) : json(nullptr);
  return {{"schema_version", kSchemaVersion},
          {"metric", to_string(report.metric_config.metric)},
          {"normalize", report.metric_config.normalize},
          {"w", report.metric_config.smoothing_w},
          {"per_dimension", per},
          {"aggregate", report.aggregate ? json(*report.aggregate) : json(nullptr)},
          {"aggregation", to_json(report.aggregation)}};
}

json radar_json(const BiasReport& report) {
  json arr = json::array();
  for (std::size_t d = 0; d < report.dimensions.size(); ++d)
    arr.push_back({{"dimension", report.dimensions[d]},
                   {"score", report.per_dimension[d] ? json(*report.per_dimension[d]) : json(nullptr)}});
  return arr;
}

json to_json(const Distribution& dist) {
  json j = {{"dimension", dist.dimension},
            {"kind", to_string(dist.bins.kind)},
            {"missing_bin", dist.bins.missing_bin},
            {"probs", dist.probs},
            {"support_count", dist.support_count},
            {"has_other", dist.has_other()}};
  if (dist.bins.kind == DimensionKind::Numerical)
    j["edges"] = dist.bins.edges;
  else
    j["categories"] = dist.bins.categories;
  return j;
}

json to_json(const KsResult& ks) {
  return {{"statistic", ks.statistic}, {"p_value", ks.p_value}, {"reject_at_5pct", ks.reject_at_5pct}};
}

json to_json(const RandomBaseline& b) {
  return {{"sample_size", b.sample_size},   {"iterations", b.iterations},
          {"mean_bias", b.mean_bias},       {"ci95_half_width", b.ci95_half_width},
          {"min_bias", b.min_bias},         {"max_bias", b.max_bias}};
}

json to_json(const ExtensionCandidate& c) {
  return {{"asn", c.asn.value()},
          {"bias_delta", number_or_null(c.bias_delta)},
          {"relative_delta_pct", c.relative_delta_pct ? number_or_null(*c.relative_delta_pct) : json(nullptr)}};
}

json asn_array(const AsnSet& asns) {
  json arr = json::array();
  for (Asn a : asns) arr.push_back(a.value());
  return arr;
}

json asn_array(const std::vector<Asn>& asns) {
  json arr = json::array();
  for (Asn a : asns) arr.push_back(a.value());
  return arr;
}

json trajectory_json(const std::vector<TrajectoryPoint>& trajectory) {
  json arr = json::array();
  for (const auto& [size, bias] : trajectory) arr.push_back(json::array({size, number_or_null(bias)}));
  return arr;
}

json bias_json(const FeatureTable& table, const AsnSet& population, const AsnSet& sample,
               const BiasSettings& settings) {
  return to_json(bias_vector(table, population, sample, settings.metric, settings.aggregation, settings.distribution));
}

json ks_json(const FeatureTable& table, const AsnSet& population, const AsnSet& sample,
             const BiasSettings& settings) {
  json per = json::object();
  for (const auto& [name, result] : ks_vector(table, population, sample, settings.distribution))
    per[name] = result ? to_json(*result) : json(nullptr);
  return {{"schema_version", kSchemaVersion}, {"per_dimension", per}};
}

json distribution_pair_json(const FeatureTable& table, const AsnSet& population, const AsnSet& sample,
                            const std::string& dimension, const BiasSettings& settings) {
  const auto bins = build_binning(table, population, dimension, settings.distribution);
  return {{"schema_version", kSchemaVersion},
          {"dimension", dimension},
          {"population", to_json(empirical_distribution(table, population, bins))},
          {"sample", to_json(empirical_distribution(table, sample, bins))}};
}

json subsample_json(const FeatureTable& table, const AsnSet& population, const AsnSet& vantage_points,
                    std::size_t k, SubsampleAlgorithm algorithm, bool early_exit, const BiasSettings& settings) {
  const BiasEngine engine(table, population, settings.metric, settings.aggregation, settings.distribution);
  SubsampleOptions options{early_exit, settings.threads};
  SubsampleResult result;
  if (algorithm == SubsampleAlgorithm::Greedy)
    result = greedy_subsample(engine, vantage_points, k, options);
  else if (algorithm == SubsampleAlgorithm::Sorting)
    result = sorting_subsample(engine, vantage_points, k, options);
  else
    throw Error(ErrorCode::InvalidConfig, "subsample supports greedy or sorting");
  return {{"schema_version", kSchemaVersion},
          {"algorithm", to_string(result.algorithm)},
          {"k", k},
          {"metric", to_json(settings.metric)},
          {"aggregation", to_json(settings.aggregation)},
          {"selected", asn_array(result.selected)},
          {"removed", asn_array(result.removed)},
          {"trajectory", trajectory_json(result.trajectory)}};
}

json extend_json(const FeatureTable& table, const AsnSet& population, const AsnSet& vantage_points,
                 const std::optional<AsnSet>& candidates, const ExtendRequest& request, const BiasSettings& settings) {
  const BiasEngine engine(table, population, settings.metric, settings.aggregation, settings.distribution);
  AsnSet pool;
  if (candidates) {
    pool = *candidates;
  } else {
    std::set_difference(population.begin(), population.end(), vantage_points.begin(), vantage_points.end(),
                        std::inserter(pool, pool.end()));
  }
  auto options = request.options;
  options.threads = settings.threads;

  const auto ranking = score_candidates(engine, vantage_points, pool, options);
  ExtensionResult result;
  if (request.algorithm == SubsampleAlgorithm::Greedy)
    result = greedy_extend(engine, vantage_points, pool, request.n, options);
  else if (request.algorithm == SubsampleAlgorithm::Sorting)
    result = sorting_extend(engine, vantage_points, pool, request.n, options);
  else
    throw Error(ErrorCode::InvalidConfig, "extend supports greedy or sorting");

  json ranked = json::array();
  for (const auto& c : ranking) ranked.push_back(to_json(c));
  return {{"schema_version", kSchemaVersion},
          {"algorithm", to_string(result.algorithm)},
          {"n", request.n},
          {"exclude_stubs", options.exclude_stubs},
          {"metric", to_json(settings.metric)},
          {"aggregation", to_json(settings.aggregation)},
          {"added", asn_array(result.added)},
          {"trajectory", trajectory_json(result.trajectory)},
          {"ranking", ranked}};
}

json baseline_json(const FeatureTable& table, const AsnSet& population, const AsnSet& source,
                   const std::vector<std::size_t>& sizes, std::size_t iterations, std::uint64_t seed,
                   const BiasSettings& settings) {
  const BiasEngine engine(table, population, settings.metric, settings.aggregation, settings.distribution);
  json results = json::array();
  for (std::size_t k : sizes) results.push_back(to_json(random_baseline(engine, source, k, iterations, seed)));
  return {{"schema_version", kSchemaVersion},
          {"seed", seed},
          {"iterations", iterations},
          {"metric", to_json(settings.metric)},
          {"aggregation", to_json(settings.aggregation)},
          {"results", results}};
}

std::string canonical(const json& doc) { return doc.dump(); }

}  // namespace vpbias::app
