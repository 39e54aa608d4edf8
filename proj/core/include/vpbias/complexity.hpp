#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vpbias/extension.hpp"
#include "vpbias/feature_table.hpp"

namespace vpbias {

/// Questionnaire answers for one label on the [-3, +3] scale.
struct LabelStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;

  friend bool operator==(const LabelStats&, const LabelStats&) = default;
};

class ComplexityScoreTable {
 public:
  ComplexityScoreTable() = default;
  /// Throws InvalidScoreTable unless -3 <= min <= mean <= max <= +3.
  explicit ComplexityScoreTable(std::map<std::string, LabelStats> entries);

  /// Summary of the questionnaire answers, shipped as core/data/complexity_scores.csv.
  static const ComplexityScoreTable& default_table();

  /// CSV with `label,min,mean,max`.
  static ComplexityScoreTable parse(std::istream& in);
  static ComplexityScoreTable load(const std::filesystem::path& path);
  void write(std::ostream& out) const;

  const std::map<std::string, LabelStats>& entries() const noexcept { return entries_; }
  bool contains(std::string_view label) const;
  const LabelStats* find(std::string_view label) const;

  friend bool operator==(const ComplexityScoreTable&, const ComplexityScoreTable&) = default;

 private:
  std::map<std::string, LabelStats> entries_;
};

enum class LabelStat { Min, Mean, Max };
enum class CrossLabel { Min, Max, Merge };

std::string_view to_string(LabelStat stat) noexcept;
std::string_view to_string(CrossLabel cross) noexcept;
std::optional<LabelStat> parse_label_stat(std::string_view text);
std::optional<CrossLabel> parse_cross_label(std::string_view text);

struct CollapsePolicy {
  LabelStat per_label_stat = LabelStat::Mean;
  CrossLabel cross_label = CrossLabel::Merge;

  static std::array<CollapsePolicy, 9> all();

  friend bool operator==(const CollapsePolicy&, const CollapsePolicy&) = default;
};

enum class UnknownLabelPolicy {
  Reject,   // UnknownLabel error
  Neutral,  // score the label as {0, 0, 0}
};

struct ComplexityScore {
  Asn asn;
  double raw = 0.0;         // [-3, +3]
  double normalized = 0.0;  // raw / 3
};

/// Per-label statistic first, then across labels: Min/Max take the extreme;
/// Merge returns -3 if any statistic is -3, else +3 if any is +3, else the
/// mean. Throws EmptyLabelSet or UnknownLabel.
double collapse(const std::set<std::string>& labels, const ComplexityScoreTable& table,
                const CollapsePolicy& policy, UnknownLabelPolicy unknown = UnknownLabelPolicy::Reject);

/// Throws UnknownLabel for the first label absent from the table, and
/// EmptyLabelSet for an assignment without labels.
void validate_labels(std::span<const LabelAssignment> assignments, const ComplexityScoreTable& table);

std::vector<LabelAssignment> load_labels(const std::filesystem::path& path, const ComplexityScoreTable& table);

std::vector<ComplexityScore> score_all(std::span<const LabelAssignment> assignments,
                                       const ComplexityScoreTable& table, const CollapsePolicy& policy = {},
                                       UnknownLabelPolicy unknown = UnknownLabelPolicy::Reject);

struct EcdfPoint {
  double value = 0.0;
  double fraction = 0.0;  // share of values <= value
};

/// Step points of the empirical CDF, one per distinct value.
std::vector<EcdfPoint> ecdf(std::span<const double> values);

struct ComplexityBiasRecord {
  Asn asn;
  double bias_delta = 0.0;
  double normalized_complexity = 0.0;
};

struct ComplexityBiasJoin {
  std::vector<ComplexityBiasRecord> records;  // candidate ranking order
  std::vector<Asn> missing_score;             // candidates without a complexity score
};

ComplexityBiasJoin complexity_vs_bias(std::span<const ExtensionCandidate> candidates,
                                      std::span<const ComplexityScore> scores);

ComplexityBiasJoin complexity_vs_bias(const BiasEngine& engine, const AsnSet& vantage_points,
                                      const AsnSet& candidates, std::span<const ComplexityScore> scores,
                                      const ExtensionOptions& options = {});

}  // namespace vpbias
