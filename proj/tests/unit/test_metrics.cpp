#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "vpbias/distribution.hpp"
#include "vpbias/metrics.hpp"

using namespace vpbias;
using V = std::vector<double>;

TEST_CASE("smoothed KL, toy example values") {
  // 0.5 ln(0.5/0.797) + 0.5 ln(0.5/0.203)
  const double gender = 0.5 * std::log(0.5 / 0.797) + 0.5 * std::log(0.5 / 0.203);
  CHECK(kl_smoothed(V{0.5, 0.5}, V{0.8, 0.2}, 0.01, false) == doctest::Approx(gender).epsilon(1e-14));
  CHECK(std::abs(gender - 0.2176) < 5e-5);
  const double country = 0.7 * std::log(0.7 / 0.799) + 0.3 * std::log(0.3 / 0.201);
  CHECK(kl_smoothed(V{0.7, 0.3}, V{0.8, 0.2}, 0.01, false) == doctest::Approx(country).epsilon(1e-14));
  CHECK(std::abs(country - 0.0275) < 5e-5);
}

TEST_CASE("smoothed KL extremes") {
  CHECK(kl_smoothed(V{0.3, 0.7}, V{0.3, 0.7}, 0.01, true) == 0.0);
  CHECK(kl_smoothed(V{0.3, 0.7}, V{0.3, 0.7}, 0.01, false) == 0.0);
  CHECK(kl_smoothed(V{1, 0}, V{0, 1}, 0.01, true) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kl_smoothed(V{1, 0}, V{0, 1}, 0.01, false) == doctest::Approx(std::log(100.0)));
}

TEST_CASE("total variation and max distance") {
  CHECK(total_variation(V{0.2, 0.8}, V{0.2, 0.8}) == 0.0);
  CHECK(total_variation(V{1, 0}, V{0, 1}) == 1.0);
  CHECK(total_variation(V{0.5, 0.5}, V{0.8, 0.2}) == doctest::Approx(0.3));
  CHECK(max_distance(V{0.2, 0.8}, V{0.2, 0.8}) == 0.0);
  CHECK(max_distance(V{0.5, 0.5}, V{0.8, 0.2}) == doctest::Approx(0.3));
  CHECK(max_distance(V{0.6, 0.2, 0.2}, V{0.7, 0.1, 0.2}) == doctest::Approx(0.1));
}

TEST_CASE("sensitivity example") {
  const V p{0.6, 0.2, 0.2}, qa{0.7, 0.1, 0.2}, qb{0.6, 0.1, 0.3};
  CHECK(total_variation(p, qa) == total_variation(p, qb));
  CHECK(kl_smoothed(p, qa, 0.01, true) < kl_smoothed(p, qb, 0.01, true));
}

TEST_CASE("config validation") {
  CHECK_ERROR_CODE((BiasMetricConfig{Metric::KlSmoothed, 0.0, true}.validate()), ErrorCode::InvalidConfig);
  CHECK_ERROR_CODE((BiasMetricConfig{Metric::KlSmoothed, 1.0, true}.validate()), ErrorCode::InvalidConfig);
  CHECK_NOTHROW((BiasMetricConfig{}.validate()));
  CHECK(parse_metric("tv") == Metric::TotalVariation);
  CHECK_FALSE(parse_metric("KL"));
}

namespace {

Distribution dist(V probs, std::vector<std::string> cats, std::int64_t n = 10) {
  Distribution d;
  d.dimension = "x";
  d.bins.dimension = "x";
  d.bins.kind = DimensionKind::Categorical;
  d.bins.categories = std::move(cats);
  d.probs = std::move(probs);
  d.support_count = n;
  return d;
}

}  // namespace

TEST_CASE("distribution overloads check bins and pad other") {
  auto p = dist({0.5, 0.5}, {"a", "b"});
  auto q = dist({0.5, 0.25, 0.25}, {"a", "b"});
  CHECK(total_variation(p, q) == doctest::Approx(0.25));
  auto r = dist({0.5, 0.5}, {"a", "c"});
  CHECK_ERROR_CODE(total_variation(p, r), ErrorCode::BinMismatch);
  CHECK_ERROR_CODE(score(p, r, {}), ErrorCode::BinMismatch);
}

TEST_CASE("KS test") {
  auto p = dist({0.5, 0.5}, {"a", "b"}, 100);
  auto same = ks_test(p, p, 100, 100);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);
  CHECK_FALSE(same.reject_at_5pct);

  auto r = ks_test(dist({1, 0}, {"a", "b"}), dist({0, 1}, {"a", "b"}), 100, 100);
  CHECK(r.statistic == 1.0);
  CHECK(r.reject_at_5pct);

  auto s = ks_test(dist({0.5, 0.5}, {"a", "b"}), dist({0.55, 0.45}, {"a", "b"}), 10, 10);
  CHECK(s.statistic == doctest::Approx(0.05));
  CHECK_FALSE(s.reject_at_5pct);

  CHECK_ERROR_CODE(ks_test(p, p, 0, 10), ErrorCode::InsufficientSupport);
}

TEST_CASE("Kolmogorov survival function") {
  // Reference values of the limiting distribution.
  CHECK(kolmogorov_survival(1.3580986) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(kolmogorov_survival(1.2238479) == doctest::Approx(0.10).epsilon(1e-6));
  CHECK(kolmogorov_survival(1.6276236) == doctest::Approx(0.01).epsilon(1e-5));
  CHECK(kolmogorov_survival(0.0) == 1.0);
  // Both series agree where they switch over.
  CHECK(kolmogorov_survival(1.18 - 1e-12) == doctest::Approx(kolmogorov_survival(1.18)).epsilon(1e-9));
  double prev = 1.0;
  for (double l = 0.05; l < 4.0; l += 0.05) {
    const double q = kolmogorov_survival(l);
    CHECK(q <= prev);
    prev = q;
  }
}
