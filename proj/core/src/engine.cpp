#include "vpbias/engine.hpp"

#include <algorithm>

#include "vpbias/error.hpp"

namespace vpbias {

BiasEngine::BiasEngine(const FeatureTable& table, const AsnSet& population, BiasMetricConfig cfg,
                       AggregationSpec agg, DistributionOptions options)
    : table_(&table), population_(population), cfg_(std::move(cfg)), agg_(std::move(agg)) {
  if (population_.empty()) throw Error(ErrorCode::EmptyPopulation, "population is empty");
  cfg_.validate();
  agg_.validate(table.schema());

  const auto& schema = table.schema();
  dims_.resize(schema.size());
  for (std::size_t d = 0; d < schema.size(); ++d) {
    auto& dim = dims_[d];
    switch (agg_.mode) {
      case AggregationMode::WeightedMean: {
        auto it = agg_.weights.find(schema[d].name);
        dim.in_scope = it != agg_.weights.end() && it->second > 0.0;
        break;
      }
      case AggregationMode::SubsetMean:
        dim.in_scope = std::find(agg_.subset.begin(), agg_.subset.end(), schema[d].name) != agg_.subset.end();
        break;
      default:
        dim.in_scope = true;
    }

    dim.bin_of.assign(table.num_rows(), -1);
    try {
      dim.bins = build_binning(table, population_, schema[d].name, options);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoData) throw;
      continue;
    }
    const auto p = empirical_distribution(table, population_, *dim.bins);
    dim.p = p.probs;
    dim.p.resize(dim.bins->bin_count() + 1, 0.0);
    for (std::size_t r = 0; r < table.num_rows(); ++r) {
      if (auto bin = dim.bins->bin_of(table.cell(r, d))) dim.bin_of[r] = static_cast<std::int32_t>(*bin);
    }
  }
}

std::size_t BiasEngine::row_of(Asn asn) const {
  auto row = table_->row_index(asn);
  if (!row) throw Error(ErrorCode::UnknownAsn, "ASN " + to_string(asn) + " is not in the feature table");
  return *row;
}

BiasEngine::Counts BiasEngine::empty_counts() const {
  Counts counts;
  counts.bins.resize(dims_.size());
  counts.support.assign(dims_.size(), 0);
  for (std::size_t d = 0; d < dims_.size(); ++d) counts.bins[d].assign(dims_[d].p.size(), 0);
  return counts;
}

BiasEngine::Counts BiasEngine::counts_of(const AsnSet& members) const {
  auto counts = empty_counts();
  for (Asn asn : members) add(counts, row_of(asn));
  return counts;
}

void BiasEngine::add(Counts& counts, std::size_t row) const {
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    const auto bin = dims_[d].bin_of[row];
    if (bin < 0) continue;
    ++counts.bins[d][static_cast<std::size_t>(bin)];
    ++counts.support[d];
  }
  ++counts.members;
}

void BiasEngine::remove(Counts& counts, std::size_t row) const {
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    const auto bin = dims_[d].bin_of[row];
    if (bin < 0) continue;
    --counts.bins[d][static_cast<std::size_t>(bin)];
    --counts.support[d];
  }
  --counts.members;
}

std::optional<double> BiasEngine::dimension_score(std::size_t d, const Counts& counts, std::vector<double>& q) const {
  const auto& dim = dims_[d];
  if (!dim.bins || counts.support[d] == 0) return std::nullopt;
  const auto& c = counts.bins[d];
  q.resize(c.size());
  const double support = static_cast<double>(counts.support[d]);
  for (std::size_t i = 0; i < c.size(); ++i) q[i] = static_cast<double>(c[i]) / support;
  return metric_value(dim.p, q, cfg_);
}

std::vector<std::optional<double>> BiasEngine::scores(const Counts& counts) const {
  std::vector<std::optional<double>> out(dims_.size());
  std::vector<double> q;
  for (std::size_t d = 0; d < dims_.size(); ++d) out[d] = dimension_score(d, counts, q);
  return out;
}

std::optional<double> BiasEngine::try_bias(const Counts& counts) const {
  std::vector<std::optional<double>> out(dims_.size());
  std::vector<double> q;
  bool any = false;
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    if (!dims_[d].in_scope) continue;
    out[d] = dimension_score(d, counts, q);
    any = any || out[d].has_value();
  }
  if (!any) return std::nullopt;
  return aggregate_scores(table_->schema(), out, agg_);
}

double BiasEngine::bias(const Counts& counts) const {
  auto b = try_bias(counts);
  if (!b) throw Error(ErrorCode::NoAggregatableDimension, "no dimension with data is in aggregation scope");
  return *b;
}

}  // namespace vpbias
