#include <numeric>
#include <random>

#include "oracle.hpp"
#include "test_util.hpp"
#include "vpbias/distribution.hpp"

using namespace vpbias;
using testutil::asns;
using testutil::table_from;

TEST_CASE("categories are sorted") {
  auto t = table_from("asn,continent\n1,EU\n2,AS\n3,EU\n");
  auto b = build_binning(t, t.asn_set(), "continent");
  CHECK(b.categories == std::vector<std::string>{"AS", "EU"});
  auto d = empirical_distribution(t, t.asn_set(), b);
  REQUIRE(d.probs.size() == 2);
  CHECK(d.probs[0] == doctest::Approx(1.0 / 3));
  CHECK(d.probs[1] == doctest::Approx(2.0 / 3));
}

TEST_CASE("missing values are excluded") {
  auto t = table_from("asn,continent\n1,EU\n2,\n3,AS\n");
  auto b = build_binning(t, t.asn_set(), "continent");
  auto d = empirical_distribution(t, asns({1, 2}), b);
  CHECK(d.probs == std::vector<double>{0.0, 1.0});
  CHECK(d.support_count == 1);
}

TEST_CASE("missing as its own bin") {
  auto t = table_from("asn,continent\n1,EU\n2,\n3,AS\n");
  auto b = build_binning(t, t.asn_set(), "continent", {.missing_as_category = true});
  CHECK(b.bin_count() == 3);
  auto d = empirical_distribution(t, t.asn_set(), b);
  CHECK(d.probs[2] == doctest::Approx(1.0 / 3));
}

TEST_CASE("quantile edges over 1..100") {
  std::string csv = "asn,v\n";
  for (int i = 1; i <= 100; ++i) csv += std::to_string(i) + "," + std::to_string(i) + "\n";
  auto t = table_from(csv);
  auto b = build_binning(t, t.asn_set(), "v");
  REQUIRE(b.edges.size() == 11);
  for (int j = 0; j <= 10; ++j) CHECK(b.edges[j] == doctest::Approx(1.0 + 99.0 * j / 10.0));
  auto d = empirical_distribution(t, t.asn_set(), b);
  CHECK(d.probs.size() == 10);
  for (double p : d.probs) CHECK(p == doctest::Approx(0.1));
}

TEST_CASE("constant column collapses to one bin") {
  auto t = table_from("asn,v\n1,5\n2,5\n3,5\n");
  auto b = build_binning(t, t.asn_set(), "v");
  CHECK(b.edges == std::vector<double>{5.0, 5.0});
  CHECK(b.regular_bins() == 1);
  auto d = empirical_distribution(t, t.asn_set(), b);
  CHECK(d.probs == std::vector<double>{1.0});
}

TEST_CASE("out of range sample values fall in the edge bins") {
  auto t = table_from("asn,v\n1,1\n2,2\n3,3\n4,4\n5,100\n6,-100\n");
  auto b = build_binning(t, asns({1, 2, 3, 4}), "v");
  auto d = empirical_distribution(t, asns({5, 6}), b);
  CHECK(d.probs.front() == 0.5);
  CHECK(d.probs.back() == 0.5);
}

TEST_CASE("tokens unseen in the population go to other") {
  auto t = table_from("asn,c\n1,a\n2,b\n3,z\n");
  auto b = build_binning(t, asns({1, 2}), "c");
  auto d = empirical_distribution(t, asns({1, 3}), b);
  CHECK(d.has_other());
  CHECK(d.probs == std::vector<double>{0.5, 0.0, 0.5});
  auto p = empirical_distribution(t, asns({1, 2}), b);
  CHECK_FALSE(p.has_other());
}

TEST_CASE("toy population: 50 men and 50 women") {
  std::string csv = "asn,gender\n";
  for (int i = 1; i <= 100; ++i) csv += std::to_string(i) + "," + (i <= 50 ? "man" : "woman") + "\n";
  auto t = table_from(csv);
  auto b = build_binning(t, t.asn_set(), "gender");
  CHECK(empirical_distribution(t, t.asn_set(), b).probs == std::vector<double>{0.5, 0.5});
}

TEST_CASE("errors") {
  auto t = table_from("asn,c,v\n1,a,\n2,b,\n");
  CHECK_ERROR_CODE(build_binning(t, {}, "c"), ErrorCode::EmptyPopulation);
  CHECK_ERROR_CODE(build_binning(t, t.asn_set(), "nope"), ErrorCode::UnknownDimension);
  CHECK_ERROR_CODE(build_binning(t, asns({7}), "c"), ErrorCode::UnknownAsn);
  auto b = build_binning(t, t.asn_set(), "c");
  CHECK_ERROR_CODE(empirical_distribution(t, {}, b), ErrorCode::EmptySample);
}

TEST_CASE("sub-population mixture and determinism") {
  auto spec = oracle::small_spec(5, 400);
  auto out = synth::generate(spec);
  const auto& t = out.table;
  const auto pop = t.asn_set();
  std::mt19937_64 g(3);
  for (const auto& dim : t.schema()) {
    auto b = build_binning(t, pop, dim.name);
    auto full = empirical_distribution(t, pop, b);
    CHECK(empirical_distribution(t, pop, b).probs == full.probs);

    // Random 3-way partition; the support-weighted mixture is the whole.
    std::array<AsnSet, 3> parts;
    for (Asn a : pop) parts[g() % 3].insert(a);
    std::vector<double> mix(full.probs.size(), 0.0);
    std::int64_t total = 0;
    for (const auto& part : parts) {
      auto d = empirical_distribution(t, part, b);
      for (std::size_t i = 0; i < d.probs.size(); ++i) mix[i] += d.probs[i] * static_cast<double>(d.support_count);
      total += d.support_count;
    }
    CHECK(total == full.support_count);
    for (std::size_t i = 0; i < mix.size(); ++i) CHECK(std::abs(mix[i] / total - full.probs[i]) < 1e-9);
  }
}
