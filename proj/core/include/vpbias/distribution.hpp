#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vpbias/feature_table.hpp"

namespace vpbias {

struct DistributionOptions {
  /// Count missing values in a dedicated bin instead of excluding them.
  bool missing_as_category = false;
};

/// Bin layout for one dimension. Bins are ordered as
/// [regular bins..., missing bin (optional)], followed by an implicit "other"
/// cell that only ever receives categorical tokens unseen in the population.
struct BinningSpec {
  std::string dimension;
  DimensionKind kind = DimensionKind::Numerical;
  std::vector<double> edges;            // numerical: strictly increasing, or [v, v]
  std::vector<std::string> categories;  // categorical: lexicographic order
  bool missing_bin = false;

  std::size_t regular_bins() const noexcept;
  std::size_t bin_count() const noexcept { return regular_bins() + (missing_bin ? 1 : 0); }
  std::size_t other_index() const noexcept { return bin_count(); }

  /// Bin of a cell, nullopt when the cell is excluded (missing without a
  /// missing bin, or a cell of the wrong kind). Out-of-range numbers clamp
  /// into the edge bins; unseen tokens map to other_index().
  std::optional<std::size_t> bin_of(const Cell& cell) const;

  friend bool operator==(const BinningSpec&, const BinningSpec&) = default;
};

struct Distribution {
  std::string dimension;
  BinningSpec bins;
  std::vector<double> probs;  // bin_count() cells, plus "other" when used
  std::int64_t support_count = 0;

  bool has_other() const noexcept { return probs.size() > bins.bin_count(); }
};

/// Population-anchored binning: lexicographic categories, or quantile edges at
/// j/bin_count with duplicates collapsed. Throws NoData when the population
/// has no usable value for the dimension.
BinningSpec build_binning(const FeatureTable& table, const AsnSet& population,
                          std::string_view dimension, const DistributionOptions& options = {});

/// Throws NoData when no member has a usable value and UnknownAsn when a
/// member is not in the table.
Distribution empirical_distribution(const FeatureTable& table, const AsnSet& members,
                                    const BinningSpec& bins);

/// Normalizes per-bin counts (bin_count() + 1 cells, last is "other"). The
/// "other" cell is dropped when empty. Throws NoData when all counts are 0.
Distribution distribution_from_counts(const BinningSpec& bins, std::span<const std::int64_t> counts);

}  // namespace vpbias
