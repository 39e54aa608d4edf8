#pragma once

// Reference implementations used as test oracles. They work straight from the
// table cells with plain loops and share no code with the library's binning,
// distribution or engine code paths.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vpbias/bias.hpp"
#include "vpbias/feature_table.hpp"
#include "vpbias/synth.hpp"

namespace oracle {

using vpbias::Asn;
using vpbias::AsnSet;
using vpbias::FeatureTable;

inline double kl(const std::vector<double>& p, const std::vector<double>& q, double w, bool normalize) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) s += p[i] * std::log(p[i] / ((1.0 - w) * q[i] + w * p[i]));
  if (s < 0.0) s = 0.0;
  if (!normalize) return s;
  return std::min(1.0, s / std::log(1.0 / w));
}

inline double tv(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return s / 2.0;
}

inline double maxd(const std::vector<double>& p, const std::vector<double>& q) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) m = std::max(m, std::fabs(p[i] - q[i]));
  return m;
}

inline double metric(const std::vector<double>& p, const std::vector<double>& q, const vpbias::BiasMetricConfig& c) {
  switch (c.metric) {
    case vpbias::Metric::KlSmoothed: return kl(p, q, c.smoothing_w, c.normalize);
    case vpbias::Metric::TotalVariation: return tv(p, q);
    case vpbias::Metric::MaxDistance: return maxd(p, q);
  }
  return 0.0;
}

// P and Q for one dimension, or nullopt when either side has no value.
inline std::optional<std::pair<std::vector<double>, std::vector<double>>> pq(const FeatureTable& t, std::size_t d,
                                                                             const AsnSet& pop, const AsnSet& s) {
  const auto& dim = t.schema()[d];
  auto cell = [&](Asn a) -> const vpbias::Cell& { return t.cell(*t.row_index(a), d); };

  std::vector<double> pc, qc;
  if (dim.kind == vpbias::DimensionKind::Categorical) {
    std::map<std::string, double> pm;
    for (Asn a : pop)
      if (auto* x = std::get_if<std::string>(&cell(a))) pm[*x] += 1;
    std::map<std::string, double> qm;
    double other = 0;
    for (Asn a : s)
      if (auto* x = std::get_if<std::string>(&cell(a))) {
        if (pm.count(*x))
          qm[*x] += 1;
        else
          other += 1;
      }
    for (auto& [k, v] : pm) {
      pc.push_back(v);
      qc.push_back(qm.count(k) ? qm[k] : 0.0);
    }
    pc.push_back(0);
    qc.push_back(other);
  } else {
    std::vector<double> pv, sv;
    for (Asn a : pop)
      if (auto* x = std::get_if<double>(&cell(a))) pv.push_back(*x);
    for (Asn a : s)
      if (auto* x = std::get_if<double>(&cell(a))) sv.push_back(*x);
    if (pv.empty()) return std::nullopt;
    std::sort(pv.begin(), pv.end());
    const int bins = dim.bin_count;
    std::vector<double> edges;
    for (int j = 0; j <= bins; ++j) {
      double h = (pv.size() - 1) * static_cast<double>(j) / bins;
      std::size_t lo = static_cast<std::size_t>(h);
      double e = lo + 1 < pv.size() ? pv[lo] + (h - lo) * (pv[lo + 1] - pv[lo]) : pv.back();
      if (edges.empty() || e > edges.back()) edges.push_back(e);
    }
    std::size_t nb = edges.size() == 1 ? 1 : edges.size() - 1;
    auto bin = [&](double x) {
      std::size_t b = 0;
      for (std::size_t i = 1; i + 1 < edges.size(); ++i)
        if (edges[i] <= x) ++b;
      return b;
    };
    pc.assign(nb, 0.0);
    qc.assign(nb, 0.0);
    for (double x : pv) pc[bin(x)] += 1;
    for (double x : sv) qc[bin(x)] += 1;
  }
  double np = 0, nq = 0;
  for (double x : pc) np += x;
  for (double x : qc) nq += x;
  if (np == 0 || nq == 0) return std::nullopt;
  for (auto& x : pc) x /= np;
  for (auto& x : qc) x /= nq;
  return std::make_pair(pc, qc);
}

/// Mean aggregate bias over dimensions with data; nullopt if none.
inline std::optional<double> bias(const FeatureTable& t, const AsnSet& pop, const AsnSet& s,
                                  const vpbias::BiasMetricConfig& c = {}) {
  double sum = 0;
  int used = 0;
  for (std::size_t d = 0; d < t.num_dimensions(); ++d) {
    auto r = pq(t, d, pop, s);
    if (!r) continue;
    sum += metric(r->first, r->second, c);
    ++used;
  }
  if (used == 0) return std::nullopt;
  return sum / used;
}

/// Library route via bias_vector; a different code path from BiasEngine.
inline double library_bias(const FeatureTable& t, const AsnSet& pop, const AsnSet& s,
                           const vpbias::BiasMetricConfig& c = {}) {
  auto r = vpbias::bias_vector(t, pop, s, c, {});
  return r.aggregate.value_or(INFINITY);
}

inline AsnSet without(AsnSet s, Asn a) {
  s.erase(a);
  return s;
}

inline AsnSet with(AsnSet s, Asn a) {
  s.insert(a);
  return s;
}

/// Small mixed-kind synthetic instance for oracle comparisons.
inline vpbias::synth::SynthSpec small_spec(std::uint64_t seed, std::size_t n) {
  using namespace vpbias::synth;
  std::mt19937_64 g(seed);
  SynthSpec spec;
  spec.n_ases = n;
  spec.seed = seed;
  spec.first_asn = 100 + static_cast<std::uint32_t>(g() % 1000);
  spec.dimensions.push_back({"continent", UniformCategorical{static_cast<int>(2 + g() % 4)},
                             vpbias::CategoryGroup::Location, {}, 0.0, false});
  spec.dimensions.push_back({"network_type", ZipfCategorical{static_cast<int>(3 + g() % 4), 1.1},
                             vpbias::CategoryGroup::NetworkType, {}, 0.1, false});
  spec.dimensions.push_back({"neighbors_total", Pareto{1.3}, vpbias::CategoryGroup::Topology, {}, 0.05, true});
  spec.dimensions.push_back({"as_hegemony", LogNormal{0.0, 1.0}, vpbias::CategoryGroup::NetworkSize, {}, 0.0, false});
  return spec;
}

}  // namespace oracle
