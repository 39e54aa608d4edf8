#include <random>
#include <sstream>

#include "oracle.hpp"
#include "test_util.hpp"
#include "vpbias/complexity.hpp"
#include "vpbias/engine.hpp"

using namespace vpbias;
using testutil::asns;
using testutil::table_from;

namespace {

const ComplexityScoreTable& T() { return ComplexityScoreTable::default_table(); }

double raw(std::set<std::string> labels, LabelStat s, CrossLabel c) { return collapse(labels, T(), {s, c}); }

}  // namespace

TEST_CASE("default score table") {
  const std::map<std::string, LabelStats> expected{
      {"Community-support", {0, 0.75, 2}},
      {"Education", {1, 1.75, 2}},
      {"Isolario-peer", {0, 1.75, 3}},
      {"Personal-use", {0, 2, 3}},
      {"Point-of-contact", {-2, 0.75, 3}},
      {"State-owned", {-2, -1, 0}},
      {"Community-Groups-Nonprofits", {0, 1, 2}},
      {"Computer-Information-Technology", {0, 0.25, 1}},
      {"Education-Research", {0, 0.25, 1}},
      {"Finance-Insurance", {-1, -0.25, 0}},
      {"Gov-Military-secondary", {-3, -0.75, 0}},
      {"Gov-Other-secondary", {-1, -0.25, 0}},
      {"Services-Law-Business-secondary", {-1, -0.25, 0}},
      {"Services-Other-secondary", {0, 0, 0}},
  };
  CHECK(T().entries() == expected);
}

TEST_CASE("collapse examples") {
  const double r = raw({"Personal-use", "Education"}, LabelStat::Mean, CrossLabel::Merge);
  CHECK(r == 1.875);
  CHECK(r / 3.0 == doctest::Approx(0.625));
  CHECK(raw({"Gov-Military-secondary"}, LabelStat::Min, CrossLabel::Merge) == -3.0);
  CHECK(raw({"Personal-use", "Gov-Military-secondary"}, LabelStat::Max, CrossLabel::Merge) == 3.0);
  CHECK(raw({"Personal-use", "Education"}, LabelStat::Min, CrossLabel::Min) == 0.0);
  CHECK(raw({"Personal-use", "Education"}, LabelStat::Mean, CrossLabel::Max) == 2.0);
}

TEST_CASE("-3 wins over +3") {
  // Min of one label hits -3 while Max of the other hits +3; use a custom
  // table where one stat yields both extremes.
  ComplexityScoreTable t({{"hard", {-3, -3, -3}}, {"easy", {3, 3, 3}}, {"mid", {0, 1, 2}}});
  CHECK(collapse({"hard", "easy"}, t, {LabelStat::Mean, CrossLabel::Merge}) == -3.0);
  CHECK(collapse({"easy", "mid"}, t, {LabelStat::Mean, CrossLabel::Merge}) == 3.0);
  CHECK(collapse({"mid"}, t, {LabelStat::Max, CrossLabel::Merge}) == 2.0);
}

TEST_CASE("collapse errors and unknown policy") {
  CHECK_ERROR_CODE(collapse({}, T(), {}), ErrorCode::EmptyLabelSet);
  CHECK_ERROR_CODE(collapse({"Nope"}, T(), {}), ErrorCode::UnknownLabel);
  CHECK(collapse({"Nope", "Personal-use"}, T(), {}, UnknownLabelPolicy::Neutral) == 1.0);
}

TEST_CASE("score table validation") {
  CHECK_ERROR_CODE(ComplexityScoreTable({{"x", {1, 0, 2}}}), ErrorCode::InvalidScoreTable);
  CHECK_ERROR_CODE(ComplexityScoreTable({{"x", {-4, 0, 2}}}), ErrorCode::InvalidScoreTable);
  std::istringstream bad("label,min,mean,max\nx,0,abc,1\n");
  CHECK_ERROR_CODE(ComplexityScoreTable::parse(bad), ErrorCode::MalformedCsv);
  std::ostringstream out;
  T().write(out);
  std::istringstream back(out.str());
  CHECK(ComplexityScoreTable::parse(back) == T());
}

TEST_CASE("nine policies") {
  auto all = CollapsePolicy::all();
  std::set<std::pair<int, int>> seen;
  for (const auto& p : all) seen.insert({static_cast<int>(p.per_label_stat), static_cast<int>(p.cross_label)});
  CHECK(seen.size() == 9);
}

TEST_CASE("score_all") {
  CHECK(score_all({}, T()).empty());
  std::vector<LabelAssignment> a{{Asn(1), {"Education", "Personal-use"}}, {Asn(2), {"Education", "Personal-use"}}};
  auto s = score_all(a, T());
  REQUIRE(s.size() == 2);
  CHECK(s[0].raw == s[1].raw);
  CHECK(s[0].normalized == s[0].raw / 3.0);
}

TEST_CASE("ECDF") {
  std::vector<double> v{0.5, -1.0, 0.5, 1.0};
  auto e = ecdf(v);
  REQUIRE(e.size() == 3);
  CHECK(e[0].value == -1.0);
  CHECK(e[0].fraction == 0.25);
  CHECK(e[1].value == 0.5);
  CHECK(e[1].fraction == 0.75);
  CHECK(e[2].fraction == 1.0);
  CHECK(ecdf({}).empty());
}

TEST_CASE("ECDF plateau on a prevalence-like mixture") {
  // Most ASes carry only a neutral ASDB label; a minority carries a strong one.
  std::mt19937_64 g(8);
  std::vector<LabelAssignment> a;
  for (std::uint32_t i = 1; i <= 1000; ++i) {
    const auto r = g() % 100;
    std::set<std::string> labels{"Services-Other-secondary"};
    if (r < 10) labels = {"Personal-use"};
    if (r >= 10 && r < 20) labels = {"State-owned"};
    a.push_back({Asn(i), labels});
  }
  std::vector<double> values;
  for (const auto& s : score_all(a, T())) values.push_back(s.normalized);
  auto e = ecdf(values);
  double plateau = 0.0, prev = 0.0;
  for (const auto& p : e) {
    plateau = std::max(plateau, p.fraction - prev);
    prev = p.fraction;
  }
  CHECK(plateau == doctest::Approx(0.8).epsilon(0.05));
}

TEST_CASE("complexity joined with bias deltas") {
  std::vector<ExtensionCandidate> cands{{Asn(5), -0.1, 90.0}, {Asn(6), 0.2, std::nullopt}};
  std::vector<ComplexityScore> disjoint{{Asn(7), 1.0, 1.0 / 3}};
  auto j = complexity_vs_bias(cands, disjoint);
  CHECK(j.records.empty());
  CHECK(j.missing_score.size() == 2);

  std::vector<ComplexityScore> one{{Asn(6), 2.0, 2.0 / 3}};
  auto k = complexity_vs_bias(cands, one);
  REQUIRE(k.records.size() == 1);
  CHECK(k.records[0].asn == Asn(6));
  CHECK(k.records[0].bias_delta == 0.2);
  CHECK(k.records[0].normalized_complexity == 2.0 / 3);

  auto t = table_from("asn,c\n1,a\n2,b\n3,a\n4,b\n");
  BiasEngine e(t, t.asn_set(), {});
  std::vector<ComplexityScore> s{{Asn(2), 3.0, 1.0}, {Asn(3), 0.0, 0.0}};
  auto jj = complexity_vs_bias(e, asns({1}), asns({2, 3}), s);
  REQUIRE(jj.records.size() == 2);
  CHECK(jj.records[0].asn == Asn(2));
}
