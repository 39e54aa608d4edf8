#include <random>
#include <sstream>

#include "test_util.hpp"
#include "vpbias/analytics.hpp"

using namespace vpbias;
using testutil::asns;
using testutil::table_from;

TEST_CASE("self association") {
  std::vector<double> x{1, 2, 3, 4, 7};
  CHECK(*abs_pearson(x, x) == doctest::Approx(1.0));
  std::vector<double> neg{-1, -2, -3, -4, -7};
  CHECK(*abs_pearson(x, neg) == doctest::Approx(1.0));
  std::vector<std::size_t> a{0, 1, 2, 0, 1, 2};
  CHECK(*cramers_v(a, a) == doctest::Approx(1.0));
  std::vector<std::size_t> grp{0, 0, 1, 1};
  std::vector<double> val{1, 1, 5, 5};
  CHECK(*correlation_ratio(grp, val) == doctest::Approx(1.0));
}

TEST_CASE("undefined associations are null") {
  std::vector<double> c{3, 3, 3, 3};
  std::vector<double> x{1, 2, 3, 4};
  CHECK_FALSE(abs_pearson(c, x));
  std::vector<double> two{1, 2};
  CHECK_FALSE(abs_pearson(two, two));
  std::vector<std::size_t> one{0, 0, 0};
  std::vector<std::size_t> b{0, 1, 0};
  CHECK_FALSE(cramers_v(one, b));
}

TEST_CASE("independent columns are near zero") {
  std::mt19937_64 g(1);
  std::normal_distribution<double> n;
  std::vector<double> x, y;
  std::vector<std::size_t> a, b;
  for (int i = 0; i < 10000; ++i) {
    x.push_back(n(g));
    y.push_back(n(g));
    a.push_back(g() % 4);
    b.push_back(g() % 5);
  }
  CHECK(*abs_pearson(x, y) < 0.05);
  CHECK(*cramers_v(a, b) < 0.05);
  CHECK(*correlation_ratio(a, y) < 0.05);
}

TEST_CASE("correlation matrix") {
  auto t = table_from(
      "asn,country,continent,neighbors_total,neighbors_peers\n"
      "1,DE,EU,1,2\n2,FR,EU,2,4\n3,US,NA,3,6\n4,CA,NA,4,8\n5,DE,EU,5,10.5\n6,JP,AS,6,12\n");
  auto m = correlation_matrix(t, t.asn_set());
  REQUIRE(m.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(m.value(i, j) == m.value(j, i));
      CHECK(m.method(i, j) == m.method(j, i));
      if (auto v = m.value(i, j)) {
        CHECK(*v >= 0.0);
        CHECK(*v <= 1.0 + 1e-12);
      }
    }
  CHECK(m.method(0, 1) == AssociationMethod::CramersV);
  CHECK(m.method(0, 2) == AssociationMethod::CorrelationRatio);
  CHECK(m.method(2, 3) == AssociationMethod::Pearson);
  CHECK(*m.value(2, 3) > 0.99);
  const auto loc = static_cast<std::size_t>(CategoryGroup::Location);
  const auto topo = static_cast<std::size_t>(CategoryGroup::Topology);
  CHECK(*m.category_matrix[loc][loc] == *m.value(0, 1));
  CHECK(*m.category_matrix[topo][topo] == *m.value(2, 3));
  CHECK(m.category_matrix[loc][topo] == m.category_matrix[topo][loc]);
  CHECK_FALSE(m.category_matrix[0][static_cast<std::size_t>(CategoryGroup::NetworkType)].has_value());
}

TEST_CASE("percentiles") {
  std::vector<double> v{1, 2, 3, 4};
  CHECK(percentile(v, 50) == 2.5);
  CHECK(percentile(v, 0) == 1.0);
  CHECK(percentile(v, 100) == 4.0);
  CHECK(percentile(v, 30) == doctest::Approx(1.9));
}

TEST_CASE("percentile relative error") {
  LatencyDistribution truth, est;
  AsnSet all;
  for (std::uint32_t i = 1; i <= 100; ++i) {
    truth[Asn(i)] = i;
    est[Asn(i)] = 1.1 * i;
    all.insert(Asn(i));
  }
  std::vector<int> p{10, 30, 50, 90};
  auto same = percentile_relative_error(truth, all, truth, p);
  for (auto e : same.errors) CHECK(*e == 0.0);
  CHECK(same.mean_error == 0.0);

  auto shifted = percentile_relative_error(truth, all, est, p);
  for (auto e : shifted.errors) CHECK(*e == doctest::Approx(0.1).epsilon(1e-12));

  LatencyDistribution t1{{Asn(1), 0.8}}, s1{{Asn(1), 1.0}};
  auto r = percentile_relative_error(t1, asns({1}), s1, std::vector<int>{30});
  CHECK(r.errors[0] == 0.25);
}

TEST_CASE("percentile relative error failures") {
  LatencyDistribution truth{{Asn(1), 0.0}, {Asn(2), 0.0}};
  std::vector<int> p{50};
  CHECK_ERROR_CODE(percentile_relative_error(truth, asns({1}), truth, p), ErrorCode::AllZeroGroundTruth);
  CHECK_ERROR_CODE(percentile_relative_error(truth, asns({7}), truth, p), ErrorCode::EmptyEstimateSet);
  std::vector<int> bad{0};
  CHECK_ERROR_CODE(percentile_relative_error(truth, asns({1}), truth, bad), ErrorCode::MalformedInput);
  CHECK_ERROR_CODE(percentile_relative_error({}, asns({1}), truth, p), ErrorCode::EmptySet);
}

TEST_CASE("latency file parsing") {
  std::istringstream ok("asn,latency_ms\n1,10.5\nAS2,3\n");
  auto l = parse_latency(ok);
  CHECK(l.size() == 2);
  CHECK(l.at(Asn(2)) == 3.0);
  std::istringstream neg("asn,latency_ms\n1,-1\n");
  CHECK_ERROR_CODE(parse_latency(neg), ErrorCode::MalformedInput);
  std::istringstream hdr("asn,ms\n1,1\n");
  CHECK_ERROR_CODE(parse_latency(hdr), ErrorCode::MalformedCsv);
}
