#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ruinkit/distributions.hpp"
#include "ruinkit/errors.hpp"
#include "ruinkit/special.hpp"

#include <algorithm>
#include <cmath>

using namespace ruinkit;

namespace {

std::vector<DistributionSpec> library() {
  return {DistributionSpec::gaussian(1.0, 2.0),   DistributionSpec::exponential(0.5, 1.0),
          DistributionSpec::lognormal(0.2, 0.8),  DistributionSpec::pareto(2.0, 1.0),
          DistributionSpec::pareto(0.5, 3.0),     DistributionSpec::student_t(2.0, -1.0, 0.5),
          DistributionSpec::student_t(3.5),       DistributionSpec::cauchy(0.0, 2.0)};
}

double ks_distance(std::vector<double> v, const DistributionSpec& spec) {
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(spec, v[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace

TEST_CASE("closed-form survival values") {
  CHECK(survival(DistributionSpec::pareto(2.0, 1.0), 10.0) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(survival(DistributionSpec::pareto(2.0, 1.0), 0.5) == 1.0);
  CHECK(survival(DistributionSpec::exponential(2.0), 1.5) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
  CHECK(survival(DistributionSpec::cauchy(), 11.0) == doctest::Approx(0.5 - std::atan(11.0) / special::kPi));
  CHECK(cdf(DistributionSpec::gaussian(1.0, 1.0), -10.0) == doctest::Approx(1.910659574498663e-28).epsilon(1e-12));
  const auto b = DistributionSpec::bernoulli(0.3, -1.0, 1.0);
  CHECK(survival(b, 0.0) == doctest::Approx(0.3));
  CHECK(cdf(b, -1.0) == doctest::Approx(0.7));
  CHECK(survival(b, 1.0) == 0.0);
}

TEST_CASE("survival is nonincreasing with the right limits") {
  for (const auto& s : library()) {
    double prev = 1.0;
    for (double x = -200.0; x <= 200.0; x += 0.37) {
      const double v = survival(s, x);
      CHECK(v <= prev);
      CHECK(v >= 0.0);
      CHECK(cdf(s, x) + v == doctest::Approx(1.0).epsilon(1e-12));
      prev = v;
    }
    CHECK(survival(s, 1e20) < 1e-8);
    if (s.two_tailed()) CHECK(survival(s, -1e20) > 1.0 - 1e-8);
  }
}

TEST_CASE("quantile inverts the cdf") {
  for (const auto& s : library()) {
    const double tol = s.family == Family::student_t && s.tail_index != 2.0 ? 1e-6 : 1e-9;
    for (double q : {1e-6, 0.01, 0.1, 0.5, 0.8, 0.99, 0.999999}) {
      CHECK(cdf(s, quantile(s, q)) == doctest::Approx(q).epsilon(tol));
    }
  }
}

TEST_CASE("location-scale property") {
  const double mu = 1.5, sigma = 3.0;
  for (auto base : {DistributionSpec::gaussian(), DistributionSpec::cauchy(), DistributionSpec::student_t(2.0),
                    DistributionSpec::student_t(4.5)}) {
    auto shifted = base;
    shifted.location = mu;
    shifted.scale = sigma;
    for (double x : {-30.0, -2.0, 0.0, 1.0, 4.0, 25.0}) {
      CHECK(survival(shifted, x) == doctest::Approx(survival(base, (x - mu) / sigma)).epsilon(1e-13));
    }
  }
}

TEST_CASE("samples follow their laws: KS distance below 0.01 at n = 1e5") {
  for (const auto& s : library()) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const double d = ks_distance(sample(s, 100000, seed).values, s);
      CHECK(d < 0.01);
      total += d;
    }
    CHECK(total / 3.0 < 0.01);
  }
}

TEST_CASE("sampling is seed-deterministic") {
  const auto s = DistributionSpec::student_t(3.0);
  CHECK(sample(s, 1000, 5).values == sample(s, 1000, 5).values);
  CHECK(sample(s, 1000, 5).values != sample(s, 1000, 6).values);
}

TEST_CASE("sum of two exponentials matches the gamma(2) tail") {
  const auto e = DistributionSpec::exponential(1.0);
  for (double x : {1.0, 4.0, 8.0}) {
    const auto est = sum_survival_mc(e, 2, x, 400000, 3);
    const double exact = (1.0 + x) * std::exp(-x);
    CHECK(std::fabs(est.estimate - exact) < 4.0 * std::sqrt(exact * (1 - exact) / 400000.0));
    CHECK(est.trials == 400000);
  }
  CHECK(sum_survival_mc(e, 2, 4.0, 10000, 3, 1).hits == sum_survival_mc(e, 2, 4.0, 10000, 3, 5).hits);
}

TEST_CASE("moment limits and validation") {
  CHECK(DistributionSpec::pareto(1.5).moment_limit() == 1.5);
  CHECK(DistributionSpec::cauchy().moment_limit() == 1.0);
  CHECK(std::isinf(DistributionSpec::gaussian().moment_limit()));
  CHECK(DistributionSpec::cauchy().student_dof() == 1.0);
  CHECK_THROWS_AS(DistributionSpec::gaussian(0.0, -1.0).validate(), DomainError);
  CHECK_THROWS_AS(DistributionSpec::pareto(0.0).validate(), DomainError);
  CHECK_THROWS_AS(DistributionSpec::bernoulli(1.5).validate(), DomainError);
  CHECK_THROWS_AS(quantile(DistributionSpec::gaussian(), 1.0), DomainError);
  CHECK(family_from_string("cauchy") == Family::cauchy);
  CHECK_THROWS_AS(family_from_string("levy"), DomainError);
}
