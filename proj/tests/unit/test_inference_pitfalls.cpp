#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ruinkit/errors.hpp"
#include "ruinkit/inference_pitfalls.hpp"
#include "ruinkit/special.hpp"

#include <cmath>

using namespace ruinkit;

TEST_CASE("difference of independent gaussians") {
  const auto x = sample(DistributionSpec::gaussian(1.0, 1.0), 200000, 1).values;
  const auto y = sample(DistributionSpec::gaussian(1.0, 1.0), 200000, 2).values;
  const auto r = difference_stats(x, y);
  // Var(X - Y) = 2 while Var(X) - Var(Y) = 0; standard error of a variance is sqrt(2/n) * var.
  CHECK(std::fabs(r.correct.variance - 2.0) < 4.0 * 2.0 * std::sqrt(2.0 / 200000.0));
  CHECK(std::fabs(r.naive.variance) < 4.0 * std::sqrt(2.0 * 2.0 / 200000.0));
  CHECK(r.variance_mismatch);
  CHECK(r.pairs == 200000);
}

TEST_CASE("coefficient of variation of a difference") {
  const auto x = sample(DistributionSpec::gaussian(2.0, 1.0), 400000, 3).values;
  const auto y = sample(DistributionSpec::gaussian(1.0, 2.0), 400000, 4).values;
  const auto r = difference_stats(x, y);
  REQUIRE(r.correct.cv);
  REQUIRE(r.naive.cv);
  CHECK(*r.correct.cv == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(0.01));
  CHECK(*r.naive.cv == doctest::Approx(1.5).epsilon(0.01));
  CHECK(r.cv_mismatch);
  CHECK(r.naive.variance < 0.0);
  CHECK(r.naive_variance_negative);
}

TEST_CASE("identical paired samples") {
  const auto x = sample(DistributionSpec::gaussian(), 100, 1).values;
  const auto r = difference_stats(x, x);
  CHECK(r.correct.mean == 0.0);
  CHECK(r.correct.variance == 0.0);
  CHECK(r.cv_undefined);
  CHECK_FALSE(r.correct.cv);
}

TEST_CASE("correct variance is never negative on a fixture library") {
  const std::vector<DistributionSpec> laws = {DistributionSpec::gaussian(0, 1), DistributionSpec::gaussian(3, 5),
                                              DistributionSpec::exponential(2.0), DistributionSpec::student_t(3.0),
                                              DistributionSpec::lognormal(0, 1)};
  bool any_negative_naive = false;
  for (std::size_t i = 0; i < laws.size(); ++i) {
    for (std::size_t j = 0; j < laws.size(); ++j) {
      const auto x = sample(laws[i], 5000, i).values;
      const auto y = sample(laws[j], 5000, 100 + j).values;
      const auto r = difference_stats(x, y);
      CHECK(r.correct.variance >= 0.0);
      any_negative_naive |= r.naive_variance_negative;
    }
  }
  CHECK(any_negative_naive);
}

TEST_CASE("independent pairing handles unequal lengths") {
  const auto x = sample(DistributionSpec::gaussian(), 300, 1).values;
  const auto y = sample(DistributionSpec::gaussian(), 500, 2).values;
  CHECK_THROWS_AS(difference_stats(x, y, PairingMode::paired), DomainError);
  const auto r = difference_stats(x, y, PairingMode::independent, 9);
  CHECK(r.pairs == 500);
  CHECK(r.correct.variance > 1.0);
  CHECK(difference_stats(x, y, PairingMode::independent, 9).correct.mean == r.correct.mean);
  CHECK_THROWS_AS(difference_stats(std::vector<double>{1.0}, y, PairingMode::independent), DomainError);
}

TEST_CASE("two separate tests versus the interaction test") {
  const int n = 50;
  const double alpha = 0.05;
  const double d = effect_for_power(0.5, n, alpha);
  const auto r = two_test_fallacy_sim(d, d, n, alpha, 100000, 7);
  CHECK(r.power_x == doctest::Approx(0.5).epsilon(0.03));
  CHECK(std::fabs(r.incorrect_rate - 0.5) < 0.02);
  CHECK(std::fabs(r.correct_rate - alpha) < 0.01);

  const auto null = two_test_fallacy_sim(0.0, 0.0, n, alpha, 100000, 8);
  CHECK(std::fabs(null.incorrect_rate - 2 * alpha * (1 - alpha)) < 0.01);
  CHECK(std::fabs(null.correct_rate - alpha) < 0.01);
  CHECK_THROWS_AS(two_test_fallacy_sim(0.0, 0.0, n, alpha, 0, 1), DomainError);
  CHECK_THROWS_AS(two_test_fallacy_sim(0.0, 0.0, 1, alpha, 10, 1), DomainError);
}

TEST_CASE("incorrect procedure dominates whenever per-test power is in (0.1, 0.9)") {
  for (double power : {0.15, 0.3, 0.5, 0.7, 0.85}) {
    const double d = effect_for_power(power, 40, 0.05);
    const auto r = two_test_fallacy_sim(d, d, 40, 0.05, 20000, 3);
    CHECK(r.incorrect_rate > r.correct_rate);
  }
}

TEST_CASE("effect for power inverts the z-test power") {
  const double d = effect_for_power(0.8, 64, 0.05);
  const double z = d / std::sqrt(2.0 / 64);
  CHECK(special::normal_sf(special::normal_quantile(0.975) - z) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("luck quadrants") {
  const auto even = luck_quadrant_sim(0.5, 100000, 1);
  for (const auto& q : even.quadrants) CHECK(q.frequency == doctest::Approx(0.25).epsilon(0.02));
  // Mixed outcomes show the larger gap.
  CHECK(even.quadrants[2].mean_gap > even.quadrants[0].mean_gap);
  CHECK(even.quadrants[2].mean_gap > even.quadrants[1].mean_gap);
  CHECK(even.quadrants[3].mean_gap > even.quadrants[0].mean_gap);
  CHECK(even.quadrants[3].mean_gap > even.quadrants[1].mean_gap);
  const auto always = luck_quadrant_sim(1.0, 1000, 1);
  CHECK(always.quadrants[0].count == 1000);
  CHECK(std::string(always.quadrants[0].name) == "lucky-lucky");
  CHECK(always.quadrants[2].mean_gap == 0.0);
  CHECK_THROWS_AS(luck_quadrant_sim(1.2, 10, 1), DomainError);
}
