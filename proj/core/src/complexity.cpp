#include "vpbias/complexity.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "embedded_data.hpp"
#include "vpbias/csv.hpp"
#include "vpbias/error.hpp"

namespace vpbias {

namespace {

constexpr double kScaleMin = -3.0;
constexpr double kScaleMax = 3.0;

}  // namespace

ComplexityScoreTable::ComplexityScoreTable(std::map<std::string, LabelStats> entries) : entries_(std::move(entries)) {
  for (const auto& [label, s] : entries_) {
    if (label.empty()) throw Error(ErrorCode::InvalidScoreTable, "empty label id");
    if (!(kScaleMin <= s.min && s.min <= s.mean && s.mean <= s.max && s.max <= kScaleMax))
      throw Error(ErrorCode::InvalidScoreTable,
                  "label `" + label + "` violates -3 <= min <= mean <= max <= +3");
  }
}

const ComplexityScoreTable& ComplexityScoreTable::default_table() {
  static const ComplexityScoreTable table = [] {
    std::istringstream in(detail::kComplexityScoresCsv);
    return parse(in);
  }();
  return table;
}

ComplexityScoreTable ComplexityScoreTable::parse(std::istream& in) {
  auto records = csv::read(in);
  if (records.empty()) throw Error(ErrorCode::MalformedCsv, "score table is empty");
  const auto& header = records.front().fields;
  if (header.size() != 4 || csv::trim(header[0]) != "label" || csv::trim(header[1]) != "min" ||
      csv::trim(header[2]) != "mean" || csv::trim(header[3]) != "max")
    throw Error(ErrorCode::MalformedCsv, "score table header must be label,min,mean,max");
  std::map<std::string, LabelStats> entries;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    const auto where = " (line " + std::to_string(records[r].line) + ")";
    if (f.size() != 4) throw Error(ErrorCode::MalformedCsv, "score table arity mismatch" + where);
    auto lo = csv::parse_double(f[1]), mean = csv::parse_double(f[2]), hi = csv::parse_double(f[3]);
    if (!lo || !mean || !hi) throw Error(ErrorCode::MalformedCsv, "non-numeric score" + where);
    std::string label(csv::trim(f[0]));
    if (!entries.emplace(label, LabelStats{*lo, *mean, *hi}).second)
      throw Error(ErrorCode::InvalidScoreTable, "duplicate label `" + label + "`" + where);
  }
  return ComplexityScoreTable(std::move(entries));
}

ComplexityScoreTable ComplexityScoreTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse(in);
}

void ComplexityScoreTable::write(std::ostream& out) const {
  csv::write_row(out, {"label", "min", "mean", "max"});
  for (const auto& [label, s] : entries_)
    csv::write_row(out, {label, csv::format_double(s.min), csv::format_double(s.mean), csv::format_double(s.max)});
}

bool ComplexityScoreTable::contains(std::string_view label) const { return find(label) != nullptr; }

const LabelStats* ComplexityScoreTable::find(std::string_view label) const {
  auto it = entries_.find(std::string(label));
  return it == entries_.end() ? nullptr : &it->second;
}

std::string_view to_string(LabelStat stat) noexcept {
  switch (stat) {
    case LabelStat::Min: return "min";
    case LabelStat::Mean: return "mean";
    case LabelStat::Max: return "max";
  }
  return "mean";
}

std::string_view to_string(CrossLabel cross) noexcept {
  switch (cross) {
    case CrossLabel::Min: return "min";
    case CrossLabel::Max: return "max";
    case CrossLabel::Merge: return "merge";
  }
  return "merge";
}

std::optional<LabelStat> parse_label_stat(std::string_view text) {
  if (text == "min") return LabelStat::Min;
  if (text == "mean") return LabelStat::Mean;
  if (text == "max") return LabelStat::Max;
  return std::nullopt;
}

std::optional<CrossLabel> parse_cross_label(std::string_view text) {
  if (text == "min") return CrossLabel::Min;
  if (text == "max") return CrossLabel::Max;
  if (text == "merge") return CrossLabel::Merge;
  return std::nullopt;
}

std::array<CollapsePolicy, 9> CollapsePolicy::all() {
  std::array<CollapsePolicy, 9> out;
  std::size_t i = 0;
  for (auto stat : {LabelStat::Min, LabelStat::Mean, LabelStat::Max})
    for (auto cross : {CrossLabel::Min, CrossLabel::Max, CrossLabel::Merge}) out[i++] = {stat, cross};
  return out;
}

double collapse(const std::set<std::string>& labels, const ComplexityScoreTable& table, const CollapsePolicy& policy,
                UnknownLabelPolicy unknown) {
  if (labels.empty()) throw Error(ErrorCode::EmptyLabelSet, "cannot collapse an empty label set");
  static constexpr LabelStats kNeutral{};

  std::vector<double> values;
  values.reserve(labels.size());
  for (const auto& label : labels) {
    const LabelStats* stats = table.find(label);
    if (!stats) {
      if (unknown == UnknownLabelPolicy::Reject)
        throw Error(ErrorCode::UnknownLabel, "label `" + label + "` is not in the complexity score table");
      stats = &kNeutral;
    }
    switch (policy.per_label_stat) {
      case LabelStat::Min: values.push_back(stats->min); break;
      case LabelStat::Mean: values.push_back(stats->mean); break;
      case LabelStat::Max: values.push_back(stats->max); break;
    }
  }

  switch (policy.cross_label) {
    case CrossLabel::Min: return *std::min_element(values.begin(), values.end());
    case CrossLabel::Max: return *std::max_element(values.begin(), values.end());
    case CrossLabel::Merge: break;
  }
  // "Guaranteed not" beats "guaranteed"; otherwise average.
  if (std::find(values.begin(), values.end(), kScaleMin) != values.end()) return kScaleMin;
  if (std::find(values.begin(), values.end(), kScaleMax) != values.end()) return kScaleMax;
  double sum = 0.0;
  for (double v : values) sum += v;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return std::clamp(sum / static_cast<double>(values.size()), *lo, *hi);
}

void validate_labels(std::span<const LabelAssignment> assignments, const ComplexityScoreTable& table) {
  for (const auto& a : assignments) {
    if (a.labels.empty()) throw Error(ErrorCode::EmptyLabelSet, "ASN " + to_string(a.asn) + " has no labels");
    for (const auto& label : a.labels)
      if (!table.contains(label))
        throw Error(ErrorCode::UnknownLabel,
                    "label `" + label + "` of ASN " + to_string(a.asn) + " is not in the complexity score table");
  }
}

std::vector<LabelAssignment> load_labels(const std::filesystem::path& path, const ComplexityScoreTable& table) {
  auto assignments = load_labels(path);
  validate_labels(assignments, table);
  return assignments;
}

std::vector<ComplexityScore> score_all(std::span<const LabelAssignment> assignments, const ComplexityScoreTable& table,
                                       const CollapsePolicy& policy, UnknownLabelPolicy unknown) {
  std::vector<ComplexityScore> out;
  out.reserve(assignments.size());
  for (const auto& a : assignments) {
    const double raw = collapse(a.labels, table, policy, unknown);
    out.push_back({a.asn, raw, raw / 3.0});
  }
  return out;
}

std::vector<EcdfPoint> ecdf(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<EcdfPoint> out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    out.push_back({sorted[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

ComplexityBiasJoin complexity_vs_bias(std::span<const ExtensionCandidate> candidates,
                                      std::span<const ComplexityScore> scores) {
  std::map<Asn, double> by_asn;
  for (const auto& s : scores) by_asn[s.asn] = s.normalized;
  ComplexityBiasJoin join;
  for (const auto& c : candidates) {
    auto it = by_asn.find(c.asn);
    if (it == by_asn.end()) {
      join.missing_score.push_back(c.asn);
      continue;
    }
    join.records.push_back({c.asn, c.bias_delta, it->second});
  }
  return join;
}

ComplexityBiasJoin complexity_vs_bias(const BiasEngine& engine, const AsnSet& vantage_points, const AsnSet& candidates,
                                      std::span<const ComplexityScore> scores, const ExtensionOptions& options) {
  const auto ranking = score_candidates(engine, vantage_points, candidates, options);
  return complexity_vs_bias(ranking, scores);
}

}  // namespace vpbias
