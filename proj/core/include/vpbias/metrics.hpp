#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "vpbias/distribution.hpp"

namespace vpbias {

enum class Metric { KlSmoothed, TotalVariation, MaxDistance };

std::string_view to_string(Metric metric) noexcept;
std::optional<Metric> parse_metric(std::string_view text);

struct BiasMetricConfig {
  Metric metric = Metric::KlSmoothed;
  double smoothing_w = 0.01;  // must lie in (0, 1)
  bool normalize = true;      // KL only: divide by ln(1/w)

  void validate() const;  // throws InvalidConfig

  friend bool operator==(const BiasMetricConfig&, const BiasMetricConfig&) = default;
};

// Raw vector forms. Both spans must have the same length; callers guarantee
// they describe the same bins.

/// sum_i p_i * ln(p_i / ((1-w) q_i + w p_i)), optionally divided by ln(1/w).
/// Terms with p_i = 0 or p_i = q_i contribute exactly 0.
double kl_smoothed(std::span<const double> p, std::span<const double> q, double w, bool normalize);

/// Half the L1 distance, so the result lies in [0, 1].
double total_variation(std::span<const double> p, std::span<const double> q);

double max_distance(std::span<const double> p, std::span<const double> q);

double metric_value(std::span<const double> p, std::span<const double> q, const BiasMetricConfig& cfg);

// Distribution forms. Throw BinMismatch unless both sides share a BinningSpec;
// an "other" cell present on one side only is matched with 0.

double kl_smoothed(const Distribution& p, const Distribution& q, const BiasMetricConfig& cfg);
double total_variation(const Distribution& p, const Distribution& q);
double max_distance(const Distribution& p, const Distribution& q);
double score(const Distribution& p, const Distribution& q, const BiasMetricConfig& cfg);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject_at_5pct = false;
};

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^(j-1) e^(-2 j^2 lambda^2).
double kolmogorov_survival(double lambda);

/// Two-sample KS test over the bin order. The p-value uses the asymptotic
/// Kolmogorov distribution at lambda = sqrt(n_p n_q / (n_p + n_q)) * D.
KsResult ks_test(const Distribution& p, const Distribution& q, std::int64_t n_p, std::int64_t n_q);

}  // namespace vpbias
