#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "vpbias/engine.hpp"

namespace vpbias {

enum class SubsampleAlgorithm { Greedy, Sorting, Random };

std::string_view to_string(SubsampleAlgorithm algorithm) noexcept;
std::optional<SubsampleAlgorithm> parse_subsample_algorithm(std::string_view text);

/// (set size, aggregate bias). Bias is +inf when no dimension is aggregatable.
using TrajectoryPoint = std::pair<std::size_t, double>;

struct SubsampleResult {
  SubsampleAlgorithm algorithm = SubsampleAlgorithm::Greedy;
  AsnSet selected;
  std::vector<Asn> removed;                // in removal order
  std::vector<TrajectoryPoint> trajectory;  // starts at (|V|, B(V))
};

struct SubsampleOptions {
  /// Stop as soon as no single removal lowers the bias (greedy only). The
  /// result may then be larger than k.
  bool early_exit = false;
  unsigned threads = 0;
};

/// B(V \ {v}) for every v in V, ascending by ASN.
std::vector<std::pair<Asn, double>> removal_scores(const BiasEngine& engine, const AsnSet& vantage_points,
                                                   unsigned threads = 0);

/// Repeatedly drops argmin_v B(V \ {v}) until |V| = k; ties go to the
/// smallest ASN. Throws InvalidK unless 1 <= k < |V|.
SubsampleResult greedy_subsample(const BiasEngine& engine, const AsnSet& vantage_points, std::size_t k,
                                 const SubsampleOptions& options = {});

/// Scores every member once against the full set and drops the |V| - k
/// members with the lowest B(V \ {v}); ties go to the smallest ASN.
SubsampleResult sorting_subsample(const BiasEngine& engine, const AsnSet& vantage_points, std::size_t k,
                                  const SubsampleOptions& options = {});

struct RandomBaseline {
  std::size_t sample_size = 0;
  std::size_t iterations = 0;
  double mean_bias = 0.0;
  double ci95_half_width = 0.0;  // 1.96 * sample stddev / sqrt(iterations)
  double min_bias = 0.0;
  double max_bias = 0.0;
};

/// Aggregate bias of `iterations` uniform k-subsets of `source`, drawn from a
/// generator seeded with `seed`. Throws InvalidK when k is 0 or exceeds
/// |source|, InvalidConfig when iterations is 0.
RandomBaseline random_baseline(const BiasEngine& engine, const AsnSet& source, std::size_t k,
                               std::size_t iterations, std::uint64_t seed);

}  // namespace vpbias
