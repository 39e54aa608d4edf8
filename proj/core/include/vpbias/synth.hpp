#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vpbias/feature_table.hpp"

namespace vpbias::synth {

struct UniformCategorical {
  int k = 2;
};
struct ZipfCategorical {
  int k = 2;
  double s = 1.0;
};
struct LogNormal {
  double mu = 0.0;
  double sigma = 1.0;
};
struct Pareto {
  double alpha = 1.5;  // scale x_m = 1
};

using Generator = std::variant<UniformCategorical, ZipfCategorical, LogNormal, Pareto>;

struct DimensionSpec {
  std::string name;
  Generator generator;
  CategoryGroup category = CategoryGroup::NetworkType;
  /// Token names for categorical generators; defaults to c0..c{k-1}.
  std::vector<std::string> categories;
  double missing_rate = 0.0;
  /// Numerical generators only: round draws to integers (counts such as
  /// #neighbors).
  bool integer = false;
};

struct UniformRandom {
  std::size_t k = 0;
};
struct CategorySkew {
  std::string dimension;
  std::string category;
  double fraction = 0.0;
  std::size_t k = 0;
};

struct VpStrategy {
  std::string name;
  std::variant<UniformRandom, CategorySkew> rule;
};

struct SynthSpec {
  std::size_t n_ases = 0;
  std::uint32_t first_asn = 1;
  std::uint64_t seed = 0;
  std::vector<DimensionSpec> dimensions;
  std::vector<VpStrategy> vp_strategies;
};

struct SynthOutput {
  FeatureTable table;
  std::vector<VantagePointSet> vantage_point_sets;
};

/// Throws InvalidSpec.
void validate(const SynthSpec& spec);

/// Deterministic in the spec: the same spec always yields the same output.
/// Category-skew draws round(fraction * k) members from the named category
/// and the rest uniformly from the remaining ASes.
SynthOutput generate(const SynthSpec& spec);

/// JSON spec file. Throws InvalidSpec on schema violations.
SynthSpec parse_spec(std::string_view json_text);
SynthSpec load_spec(const std::filesystem::path& path);

/// Writes `table.csv` and one `<name>.txt` ASN list per VP set into `dir`.
void write_output(const SynthOutput& output, const std::filesystem::path& dir);

}  // namespace vpbias::synth
