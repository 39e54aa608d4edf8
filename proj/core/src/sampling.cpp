#include "vpbias/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vpbias/error.hpp"
#include "vpbias/parallel.hpp"
#include "vpbias/random.hpp"

namespace vpbias {

std::string_view to_string(SubsampleAlgorithm algorithm) noexcept {
  switch (algorithm) {
    case SubsampleAlgorithm::Greedy: return "greedy";
    case SubsampleAlgorithm::Sorting: return "sorting";
    case SubsampleAlgorithm::Random: return "random";
  }
  return "greedy";
}

std::optional<SubsampleAlgorithm> parse_subsample_algorithm(std::string_view text) {
  if (text == "greedy") return SubsampleAlgorithm::Greedy;
  if (text == "sorting") return SubsampleAlgorithm::Sorting;
  if (text == "random") return SubsampleAlgorithm::Random;
  return std::nullopt;
}

namespace {

constexpr double kUndefined = std::numeric_limits<double>::infinity();

double bias_or_inf(const BiasEngine& engine, const BiasEngine::Counts& counts) {
  return engine.try_bias(counts).value_or(kUndefined);
}

// B(current \ {members[i]}) for every i.
std::vector<double> leave_one_out(const BiasEngine& engine, const BiasEngine::Counts& counts,
                                  const std::vector<std::size_t>& rows, unsigned threads) {
  std::vector<double> out(rows.size());
  parallel_chunks(rows.size(), threads, [&](std::size_t begin, std::size_t end) {
    auto local = counts;
    for (std::size_t i = begin; i < end; ++i) {
      engine.remove(local, rows[i]);
      out[i] = bias_or_inf(engine, local);
      engine.add(local, rows[i]);
    }
  });
  return out;
}

// Members are kept in ascending ASN order, so the first minimum is the
// smallest ASN among ties.
std::size_t argmin(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[best]) best = i;
  return best;
}

void check_k(const AsnSet& vantage_points, std::size_t k) {
  if (k < 1 || k >= vantage_points.size())
    throw Error(ErrorCode::InvalidK, "k must satisfy 1 <= k < |V| (k = " + std::to_string(k) +
                                         ", |V| = " + std::to_string(vantage_points.size()) + ")");
}

}  // namespace

std::vector<std::pair<Asn, double>> removal_scores(const BiasEngine& engine, const AsnSet& vantage_points,
                                                   unsigned threads) {
  std::vector<Asn> members(vantage_points.begin(), vantage_points.end());
  std::vector<std::size_t> rows;
  rows.reserve(members.size());
  for (Asn asn : members) rows.push_back(engine.row_of(asn));
  const auto counts = engine.counts_of(vantage_points);
  const auto scores = leave_one_out(engine, counts, rows, threads);
  std::vector<std::pair<Asn, double>> out;
  out.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) out.emplace_back(members[i], scores[i]);
  return out;
}

SubsampleResult greedy_subsample(const BiasEngine& engine, const AsnSet& vantage_points, std::size_t k,
                                 const SubsampleOptions& options) {
  check_k(vantage_points, k);
  SubsampleResult result;
  result.algorithm = SubsampleAlgorithm::Greedy;

  std::vector<Asn> members(vantage_points.begin(), vantage_points.end());
  std::vector<std::size_t> rows;
  for (Asn asn : members) rows.push_back(engine.row_of(asn));
  auto counts = engine.counts_of(vantage_points);
  double current = bias_or_inf(engine, counts);
  result.trajectory.emplace_back(members.size(), current);

  while (members.size() > k) {
    const auto scores = leave_one_out(engine, counts, rows, options.threads);
    const std::size_t best = argmin(scores);
    if (options.early_exit && !(scores[best] < current)) break;
    engine.remove(counts, rows[best]);
    result.removed.push_back(members[best]);
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(best));
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(best));
    current = scores[best];
    result.trajectory.emplace_back(members.size(), current);
  }
  result.selected = AsnSet(members.begin(), members.end());
  return result;
}

SubsampleResult sorting_subsample(const BiasEngine& engine, const AsnSet& vantage_points, std::size_t k,
                                  const SubsampleOptions& options) {
  check_k(vantage_points, k);
  SubsampleResult result;
  result.algorithm = SubsampleAlgorithm::Sorting;

  auto scored = removal_scores(engine, vantage_points, options.threads);
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.second < b.second; });

  auto counts = engine.counts_of(vantage_points);
  result.selected = vantage_points;
  result.trajectory.emplace_back(vantage_points.size(), bias_or_inf(engine, counts));
  const std::size_t drop = vantage_points.size() - k;
  for (std::size_t i = 0; i < drop; ++i) {
    const Asn asn = scored[i].first;
    engine.remove(counts, engine.row_of(asn));
    result.selected.erase(asn);
    result.removed.push_back(asn);
    result.trajectory.emplace_back(result.selected.size(), bias_or_inf(engine, counts));
  }
  return result;
}

RandomBaseline random_baseline(const BiasEngine& engine, const AsnSet& source, std::size_t k,
                               std::size_t iterations, std::uint64_t seed) {
  if (k < 1 || k > source.size())
    throw Error(ErrorCode::InvalidK, "k must satisfy 1 <= k <= |source| (k = " + std::to_string(k) +
                                         ", |source| = " + std::to_string(source.size()) + ")");
  if (iterations < 1) throw Error(ErrorCode::InvalidConfig, "iterations must be at least 1");

  std::vector<std::size_t> rows;
  rows.reserve(source.size());
  for (Asn asn : source) rows.push_back(engine.row_of(asn));

  Rng rng(seed);
  std::vector<double> biases;
  biases.reserve(iterations);
  for (std::size_t it = 0; it < iterations; ++it) {
    rng.partial_shuffle(rows, k);
    auto counts = engine.empty_counts();
    for (std::size_t i = 0; i < k; ++i) engine.add(counts, rows[i]);
    biases.push_back(engine.bias(counts));
  }

  RandomBaseline out;
  out.sample_size = k;
  out.iterations = iterations;
  const auto [lo, hi] = std::minmax_element(biases.begin(), biases.end());
  out.min_bias = *lo;
  out.max_bias = *hi;
  if (*lo == *hi) {
    out.mean_bias = *lo;
    out.ci95_half_width = 0.0;
    return out;
  }
  double sum = 0.0;
  for (double b : biases) sum += b;
  const double n = static_cast<double>(iterations);
  out.mean_bias = std::clamp(sum / n, out.min_bias, out.max_bias);
  double ss = 0.0;
  for (double b : biases) ss += (b - out.mean_bias) * (b - out.mean_bias);
  const double stddev = iterations > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  out.ci95_half_width = 1.96 * stddev / std::sqrt(n);
  return out;
}

}  // namespace vpbias
