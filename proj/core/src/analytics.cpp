#include "vpbias/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "vpbias/csv.hpp"
#include "vpbias/error.hpp"
#include "vpbias/parallel.hpp"

namespace vpbias {

std::string_view to_string(AssociationMethod method) noexcept {
  switch (method) {
    case AssociationMethod::Pearson: return "pearson";
    case AssociationMethod::CorrelationRatio: return "correlation_ratio";
    case AssociationMethod::CramersV: return "cramers_v";
  }
  return "pearson";
}

namespace {

constexpr std::size_t kMinObservations = 3;

// Relabels codes to 0..k-1 in ascending order of first value; returns k.
std::size_t compact(std::vector<std::size_t>& codes) {
  std::vector<std::size_t> distinct(codes);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (auto& c : codes) c = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), c) - distinct.begin());
  return distinct.size();
}

}  // namespace

std::optional<double> abs_pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < kMinObservations || y.size() != n) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::min(1.0, std::abs(sxy) / std::sqrt(sxx * syy));
}

std::optional<double> correlation_ratio(std::span<const std::size_t> groups, std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < kMinObservations || groups.size() != n) return std::nullopt;
  std::vector<std::size_t> codes(groups.begin(), groups.end());
  const std::size_t k = compact(codes);
  std::vector<double> sums(k, 0.0);
  std::vector<std::size_t> counts(k, 0);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sums[codes[i]] += values[i];
    ++counts[codes[i]];
    mean += values[i];
  }
  mean /= static_cast<double>(n);
  double total = 0.0;
  for (double v : values) total += (v - mean) * (v - mean);
  if (total <= 0.0) return std::nullopt;
  double between = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    const double gm = sums[g] / static_cast<double>(counts[g]);
    between += static_cast<double>(counts[g]) * (gm - mean) * (gm - mean);
  }
  return std::clamp(std::sqrt(between / total), 0.0, 1.0);
}

std::optional<double> cramers_v(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  const std::size_t n = a.size();
  if (n < kMinObservations || b.size() != n) return std::nullopt;
  std::vector<std::size_t> ca(a.begin(), a.end()), cb(b.begin(), b.end());
  const std::size_t r = compact(ca), c = compact(cb);
  if (std::min(r, c) < 2) return std::nullopt;

  std::vector<double> observed(r * c, 0.0), row(r, 0.0), col(c, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    observed[ca[i] * c + cb[i]] += 1.0;
    row[ca[i]] += 1.0;
    col[cb[i]] += 1.0;
  }
  const double total = static_cast<double>(n);
  double chi2 = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double expected = row[i] * col[j] / total;
      const double diff = observed[i * c + j] - expected;
      chi2 += diff * diff / expected;
    }
  }
  return std::clamp(std::sqrt(chi2 / (total * static_cast<double>(std::min(r, c) - 1))), 0.0, 1.0);
}

CorrelationMatrix correlation_matrix(const FeatureTable& table, const AsnSet& population) {
  if (population.empty()) throw Error(ErrorCode::EmptyPopulation, "population is empty");
  const auto& schema = table.schema();
  const std::size_t dims = schema.size();

  std::vector<std::size_t> rows;
  rows.reserve(population.size());
  for (Asn asn : population) {
    auto row = table.row_index(asn);
    if (!row) throw Error(ErrorCode::UnknownAsn, "ASN " + to_string(asn) + " is not in the feature table");
    rows.push_back(*row);
  }

  // Per dimension: numbers for numerical columns, token codes for categorical
  // ones; `present` marks non-missing cells.
  std::vector<std::vector<double>> numbers(dims);
  std::vector<std::vector<std::size_t>> codes(dims);
  std::vector<std::vector<char>> present(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    present[d].assign(rows.size(), 0);
    if (schema[d].kind == DimensionKind::Numerical) {
      numbers[d].assign(rows.size(), 0.0);
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (const auto* x = std::get_if<double>(&table.cell(rows[i], d))) {
          numbers[d][i] = *x;
          present[d][i] = 1;
        }
    } else {
      std::set<std::string> tokens;
      for (std::size_t r : rows)
        if (const auto* s = std::get_if<std::string>(&table.cell(r, d))) tokens.insert(*s);
      std::vector<std::string> order(tokens.begin(), tokens.end());
      codes[d].assign(rows.size(), 0);
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (const auto* s = std::get_if<std::string>(&table.cell(rows[i], d))) {
          codes[d][i] = static_cast<std::size_t>(std::lower_bound(order.begin(), order.end(), *s) - order.begin());
          present[d][i] = 1;
        }
    }
  }

  CorrelationMatrix m;
  for (const auto& dim : schema) {
    m.dimensions.push_back(dim.name);
    m.groups.push_back(dim.category);
  }
  m.values.assign(dims * dims, std::nullopt);
  m.methods.assign(dims * dims, AssociationMethod::Pearson);

  parallel_chunks(dims, 0, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i; j < dims; ++j) {
        const bool num_i = schema[i].kind == DimensionKind::Numerical;
        const bool num_j = schema[j].kind == DimensionKind::Numerical;
        std::optional<double> value;
        AssociationMethod method;
        if (num_i && num_j) {
          method = AssociationMethod::Pearson;
          std::vector<double> x, y;
          for (std::size_t r = 0; r < rows.size(); ++r)
            if (present[i][r] && present[j][r]) {
              x.push_back(numbers[i][r]);
              y.push_back(numbers[j][r]);
            }
          value = abs_pearson(x, y);
        } else if (!num_i && !num_j) {
          method = AssociationMethod::CramersV;
          std::vector<std::size_t> a, b;
          for (std::size_t r = 0; r < rows.size(); ++r)
            if (present[i][r] && present[j][r]) {
              a.push_back(codes[i][r]);
              b.push_back(codes[j][r]);
            }
          value = cramers_v(a, b);
        } else {
          method = AssociationMethod::CorrelationRatio;
          const std::size_t cat = num_i ? j : i;
          const std::size_t num = num_i ? i : j;
          std::vector<std::size_t> g;
          std::vector<double> y;
          for (std::size_t r = 0; r < rows.size(); ++r)
            if (present[i][r] && present[j][r]) {
              g.push_back(codes[cat][r]);
              y.push_back(numbers[num][r]);
            }
          value = correlation_ratio(g, y);
        }
        m.values[i * dims + j] = m.values[j * dims + i] = value;
        m.methods[i * dims + j] = m.methods[j * dims + i] = method;
      }
    }
  });

  std::array<std::array<double, kCategoryGroupCount>, kCategoryGroupCount> sums{};
  std::array<std::array<std::size_t, kCategoryGroupCount>, kCategoryGroupCount> counts{};
  for (std::size_t i = 0; i < dims; ++i) {
    for (std::size_t j = 0; j < dims; ++j) {
      if (i == j || !m.values[i * dims + j]) continue;
      const auto a = static_cast<std::size_t>(m.groups[i]);
      const auto b = static_cast<std::size_t>(m.groups[j]);
      sums[a][b] += *m.values[i * dims + j];
      ++counts[a][b];
    }
  }
  for (std::size_t a = 0; a < kCategoryGroupCount; ++a)
    for (std::size_t b = 0; b < kCategoryGroupCount; ++b)
      if (counts[a][b]) m.category_matrix[a][b] = sums[a][b] / static_cast<double>(counts[a][b]);
  return m;
}

double percentile(std::span<const double> sorted, double pct) {
  if (sorted.empty()) throw Error(ErrorCode::NoData, "percentile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * pct / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

LatencyDistribution parse_latency(std::istream& in) {
  auto records = csv::read(in);
  if (records.empty()) throw Error(ErrorCode::MalformedCsv, "latency file is empty");
  const auto& header = records.front().fields;
  if (header.size() != 2 || csv::trim(header[0]) != "asn" || csv::trim(header[1]) != "latency_ms")
    throw Error(ErrorCode::MalformedCsv, "latency file header must be `asn,latency_ms`");
  LatencyDistribution out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    const auto where = " (line " + std::to_string(records[r].line) + ")";
    if (f.size() != 2) throw Error(ErrorCode::MalformedCsv, "latency row arity mismatch" + where);
    auto asn = parse_asn(f[0]);
    auto ms = csv::parse_double(f[1]);
    if (!asn) throw Error(ErrorCode::MalformedCsv, "invalid ASN `" + f[0] + "`" + where);
    if (!ms || *ms < 0.0) throw Error(ErrorCode::MalformedInput, "latency must be a finite value >= 0" + where);
    if (!out.emplace(*asn, *ms).second) throw Error(ErrorCode::DuplicateAsn, "duplicate ASN " + f[0] + where);
  }
  return out;
}

LatencyDistribution load_latency(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_latency(in);
}

PercentileErrors percentile_relative_error(const LatencyDistribution& ground_truth, const AsnSet& estimate_members,
                                           const LatencyDistribution& estimate_values,
                                           std::span<const int> percentiles) {
  if (ground_truth.empty()) throw Error(ErrorCode::EmptySet, "ground-truth latency distribution is empty");
  for (int p : percentiles)
    if (p < 1 || p > 99) throw Error(ErrorCode::MalformedInput, "percentiles must lie in 1..99");

  std::vector<double> truth, estimate;
  truth.reserve(ground_truth.size());
  for (const auto& [asn, ms] : ground_truth) truth.push_back(ms);
  for (Asn asn : estimate_members) {
    auto it = estimate_values.find(asn);
    if (it != estimate_values.end()) estimate.push_back(it->second);
  }
  if (estimate.empty()) throw Error(ErrorCode::EmptyEstimateSet, "no estimate member has a latency value");
  std::sort(truth.begin(), truth.end());
  std::sort(estimate.begin(), estimate.end());

  PercentileErrors out;
  out.estimate_size = estimate.size();
  double sum = 0.0;
  std::size_t used = 0;
  for (int p : percentiles) {
    const double l = percentile(truth, p);
    const double ls = percentile(estimate, p);
    out.percentiles.push_back(p);
    out.ground_truth.push_back(l);
    out.estimate.push_back(ls);
    if (l == 0.0) {
      out.errors.emplace_back();
      continue;
    }
    // |L_S - L| / L, evaluated as a ratio so exact inputs stay exact.
    const double err = std::abs(ls / l - 1.0);
    out.errors.emplace_back(err);
    sum += err;
    ++used;
  }
  if (used == 0) throw Error(ErrorCode::AllZeroGroundTruth, "ground truth is zero at every requested percentile");
  out.mean_error = sum / static_cast<double>(used);
  return out;
}

}  // namespace vpbias
