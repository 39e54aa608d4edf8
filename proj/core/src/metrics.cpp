#include "vpbias/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "vpbias/error.hpp"

namespace vpbias {

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::KlSmoothed: return "kl";
    case Metric::TotalVariation: return "tv";
    case Metric::MaxDistance: return "max";
  }
  return "kl";
}

std::optional<Metric> parse_metric(std::string_view text) {
  if (text == "kl") return Metric::KlSmoothed;
  if (text == "tv") return Metric::TotalVariation;
  if (text == "max") return Metric::MaxDistance;
  return std::nullopt;
}

void BiasMetricConfig::validate() const {
  if (!(smoothing_w > 0.0 && smoothing_w < 1.0))
    throw Error(ErrorCode::InvalidConfig, "smoothing weight w must lie in (0, 1)");
}

double kl_smoothed(std::span<const double> p, std::span<const double> q, double w, bool normalize) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    if (pi == 0.0 || pi == q[i]) continue;
    sum += pi * std::log(pi / ((1.0 - w) * q[i] + w * pi));
  }
  sum = std::max(sum, 0.0);
  if (!normalize) return sum;
  return std::min(sum / std::log(1.0 / w), 1.0);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return std::min(0.5 * sum, 1.0);
}

double max_distance(std::span<const double> p, std::span<const double> q) {
  double best = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) best = std::max(best, std::abs(p[i] - q[i]));
  return best;
}

double metric_value(std::span<const double> p, std::span<const double> q, const BiasMetricConfig& cfg) {
  switch (cfg.metric) {
    case Metric::KlSmoothed: return kl_smoothed(p, q, cfg.smoothing_w, cfg.normalize);
    case Metric::TotalVariation: return total_variation(p, q);
    case Metric::MaxDistance: return max_distance(p, q);
  }
  return 0.0;
}

namespace {

// Both probability vectors over the shared bins, padded with a zero "other"
// cell where only one side has it.
std::pair<std::vector<double>, std::vector<double>> aligned(const Distribution& p, const Distribution& q) {
  if (!(p.bins == q.bins))
    throw Error(ErrorCode::BinMismatch, "distributions `" + p.dimension + "` and `" + q.dimension +
                                            "` are not defined over the same bins");
  const std::size_t n = std::max(p.probs.size(), q.probs.size());
  std::vector<double> a(p.probs), b(q.probs);
  a.resize(n, 0.0);
  b.resize(n, 0.0);
  return {std::move(a), std::move(b)};
}

}  // namespace

double kl_smoothed(const Distribution& p, const Distribution& q, const BiasMetricConfig& cfg) {
  cfg.validate();
  auto [a, b] = aligned(p, q);
  return kl_smoothed(a, b, cfg.smoothing_w, cfg.normalize);
}

double total_variation(const Distribution& p, const Distribution& q) {
  auto [a, b] = aligned(p, q);
  return total_variation(a, b);
}

double max_distance(const Distribution& p, const Distribution& q) {
  auto [a, b] = aligned(p, q);
  return max_distance(a, b);
}

double score(const Distribution& p, const Distribution& q, const BiasMetricConfig& cfg) {
  cfg.validate();
  auto [a, b] = aligned(p, q);
  return metric_value(a, b, cfg);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double q;
  if (lambda < 1.18) {
    // Jacobi-transformed series, converges fast for small lambda.
    const double y = -std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int j = 1; j <= 40; ++j) {
      const double odd = 2.0 * j - 1.0;
      const double term = std::exp(odd * odd * y);
      sum += term;
      if (term < 1e-18) break;
    }
    q = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
  } else {
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
      const double term = std::exp(-2.0 * j * j * lambda * lambda);
      sum += sign * term;
      sign = -sign;
      if (term < 1e-18) break;
    }
    q = 2.0 * sum;
  }
  return std::clamp(q, 0.0, 1.0);
}

KsResult ks_test(const Distribution& p, const Distribution& q, std::int64_t n_p, std::int64_t n_q) {
  if (n_p <= 0 || n_q <= 0)
    throw Error(ErrorCode::InsufficientSupport, "KS test needs positive support on both sides");
  auto [a, b] = aligned(p, q);
  double cp = 0.0, cq = 0.0, d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cp += a[i];
    cq += b[i];
    d = std::max(d, std::abs(cp - cq));
  }
  KsResult result;
  result.statistic = std::min(d, 1.0);
  const double np = static_cast<double>(n_p), nq = static_cast<double>(n_q);
  const double effective_n = np * nq / (np + nq);
  result.p_value = kolmogorov_survival(std::sqrt(effective_n) * result.statistic);
  result.reject_at_5pct = result.p_value < 0.05;
  return result;
}

}  // namespace vpbias
