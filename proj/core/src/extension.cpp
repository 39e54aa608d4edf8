#include "vpbias/extension.hpp"

#include <algorithm>
#include <limits>

#include "vpbias/error.hpp"
#include "vpbias/parallel.hpp"

namespace vpbias {

namespace {

constexpr double kUndefined = std::numeric_limits<double>::infinity();

AsnSet eligible_candidates(const BiasEngine& engine, const AsnSet& vantage_points, const AsnSet& candidates,
                           const ExtensionOptions& options) {
  for (Asn asn : candidates) {
    if (vantage_points.contains(asn))
      throw Error(ErrorCode::MalformedInput, "candidate " + to_string(asn) + " is already a vantage point");
    engine.row_of(asn);
  }
  AsnSet eligible =
      options.exclude_stubs ? exclude_stub_candidates(engine.table(), candidates, options.stub_dimension) : candidates;
  if (eligible.empty()) throw Error(ErrorCode::EmptyCandidates, "no candidate left to score");
  return eligible;
}

// B(current + {rows[i]}) for every i.
std::vector<double> add_one(const BiasEngine& engine, const BiasEngine::Counts& counts,
                            const std::vector<std::size_t>& rows, unsigned threads) {
  std::vector<double> out(rows.size());
  parallel_chunks(rows.size(), threads, [&](std::size_t begin, std::size_t end) {
    auto local = counts;
    for (std::size_t i = begin; i < end; ++i) {
      engine.add(local, rows[i]);
      out[i] = engine.try_bias(local).value_or(kUndefined);
      engine.remove(local, rows[i]);
    }
  });
  return out;
}

void check_n(std::size_t n, std::size_t available) {
  if (n < 1 || n > available)
    throw Error(ErrorCode::InvalidN, "n must satisfy 1 <= n <= #candidates (n = " + std::to_string(n) +
                                         ", candidates = " + std::to_string(available) + ")");
}

}  // namespace

AsnSet exclude_stub_candidates(const FeatureTable& table, const AsnSet& candidates, const std::string& stub_dimension) {
  auto d = table.dimension_index(stub_dimension);
  if (!d)
    throw Error(ErrorCode::MissingStubDimension, "stub exclusion needs dimension `" + stub_dimension + "`");
  AsnSet out;
  for (Asn asn : candidates) {
    auto row = table.row_index(asn);
    if (row) {
      const auto* x = std::get_if<double>(&table.cell(*row, *d));
      if (x && *x == 1.0) continue;
    }
    out.insert(asn);
  }
  return out;
}

std::vector<ExtensionCandidate> score_candidates(const BiasEngine& engine, const AsnSet& vantage_points,
                                                 const AsnSet& candidates, const ExtensionOptions& options) {
  const auto eligible = eligible_candidates(engine, vantage_points, candidates, options);
  const auto counts = engine.counts_of(vantage_points);
  const double base = engine.bias(counts);

  std::vector<Asn> asns(eligible.begin(), eligible.end());
  std::vector<std::size_t> rows;
  rows.reserve(asns.size());
  for (Asn asn : asns) rows.push_back(engine.row_of(asn));
  const auto extended = add_one(engine, counts, rows, options.threads);

  std::vector<ExtensionCandidate> out;
  out.reserve(asns.size());
  for (std::size_t i = 0; i < asns.size(); ++i) {
    ExtensionCandidate c;
    c.asn = asns[i];
    c.bias_delta = extended[i] - base;
    if (base > 0.0) c.relative_delta_pct = 100.0 * extended[i] / base;
    out.push_back(c);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.bias_delta < b.bias_delta; });
  return out;
}

ExtensionResult sorting_extend(const BiasEngine& engine, const AsnSet& vantage_points, const AsnSet& candidates,
                               std::size_t n, const ExtensionOptions& options) {
  const auto ranking = score_candidates(engine, vantage_points, candidates, options);
  check_n(n, ranking.size());

  ExtensionResult result;
  result.algorithm = SubsampleAlgorithm::Sorting;
  result.selected = vantage_points;
  auto counts = engine.counts_of(vantage_points);
  result.trajectory.emplace_back(result.selected.size(), engine.try_bias(counts).value_or(kUndefined));
  for (std::size_t i = 0; i < n; ++i) {
    const Asn asn = ranking[i].asn;
    engine.add(counts, engine.row_of(asn));
    result.selected.insert(asn);
    result.added.push_back(asn);
    result.trajectory.emplace_back(result.selected.size(), engine.try_bias(counts).value_or(kUndefined));
  }
  return result;
}

ExtensionResult greedy_extend(const BiasEngine& engine, const AsnSet& vantage_points, const AsnSet& candidates,
                              std::size_t n, const ExtensionOptions& options) {
  const auto eligible = eligible_candidates(engine, vantage_points, candidates, options);
  check_n(n, eligible.size());

  ExtensionResult result;
  result.algorithm = SubsampleAlgorithm::Greedy;
  result.selected = vantage_points;
  auto counts = engine.counts_of(vantage_points);
  result.trajectory.emplace_back(result.selected.size(), engine.try_bias(counts).value_or(kUndefined));

  std::vector<Asn> remaining(eligible.begin(), eligible.end());
  std::vector<std::size_t> rows;
  for (Asn asn : remaining) rows.push_back(engine.row_of(asn));

  for (std::size_t step = 0; step < n; ++step) {
    const auto scores = add_one(engine, counts, rows, options.threads);
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
      if (scores[i] < scores[best]) best = i;
    engine.add(counts, rows[best]);
    result.selected.insert(remaining[best]);
    result.added.push_back(remaining[best]);
    result.trajectory.emplace_back(result.selected.size(), scores[best]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return result;
}

}  // namespace vpbias
