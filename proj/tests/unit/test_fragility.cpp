#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ruinkit/errors.hpp"
#include "ruinkit/fragility.hpp"
#include "ruinkit/special.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace ruinkit;

namespace {

// Sum over all 2^n failure vectors of independent sources.
double brute_force_ruin(int n, double q, int needed) {
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double p = 1.0;
    int failed = 0;
    for (int i = 0; i < n; ++i) {
      const bool f = (mask >> i) & 1u;
      failed += f;
      p *= f ? q : 1.0 - q;
    }
    if (failed >= needed) total += p;
  }
  return total;
}

int needed_failures(int n, double theta) {
  // Smallest integer count k with k >= theta * n, computed in exact rationals for theta = a/b grids.
  for (int k = 0; k <= n; ++k) {
    if (static_cast<double>(k) >= theta * n - 1e-9) return k;
  }
  return n;
}

}  // namespace

TEST_CASE("harm forms") {
  CHECK(HarmFunction::power(2.0)(3.0) == 9.0);
  CHECK(HarmFunction::linear(2.5)(4.0) == 10.0);
  CHECK(HarmFunction::threshold(2.0)(1.99) == 0.0);
  CHECK(HarmFunction::threshold(2.0)(2.0) == 1.0);
  const auto t = HarmFunction::table({{1.0, 1.0}, {2.0, 5.0}});
  CHECK(t(0.5) == doctest::Approx(0.5));
  CHECK(t(1.5) == doctest::Approx(3.0));
  CHECK(t(10.0) == 5.0);
  CHECK(HarmFunction::parse("power:3").kind() == HarmFunction::Kind::power);
  CHECK(HarmFunction::parse("threshold:4").parameter() == 4.0);
  CHECK_THROWS_AS(HarmFunction::parse("cubic:3"), ConfigError);
  CHECK_THROWS_AS(HarmFunction::parse("power"), ConfigError);
  CHECK_THROWS_AS(HarmFunction::table({{1.0, 2.0}, {2.0, 1.0}}), DomainError);
}

TEST_CASE("harm table read from CSV") {
  const auto path = std::filesystem::temp_directory_path() / "ruinkit_harm_table.csv";
  {
    std::ofstream out(path);
    out << "x,h\n0,0\n1,0.5\n3,4\n";
  }
  const auto h = HarmFunction::parse("table:" + path.string());
  CHECK(h(2.0) == doctest::Approx(2.25));
  CHECK(h(5.0) == 4.0);
  {
    std::ofstream out(path);
    out << "a,b\n0,0\n";
  }
  CHECK_THROWS_AS(HarmFunction::parse("table:" + path.string()), ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("concentration versus distribution") {
  const auto c = concentration_compare(HarmFunction::power(2.0), 10.0, 10);
  CHECK(c.concentrated == 100.0);
  CHECK(c.distributed == 10.0);
  // Linear harm: equality.
  const auto l = concentration_compare(HarmFunction::linear(3.0), 7.0, 4);
  CHECK(l.concentrated == doctest::Approx(l.distributed).epsilon(1e-15));
  // Convex harm, grid assertion.
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const auto h = HarmFunction::power(p);
    for (double total : {0.5, 1.0, 3.0, 10.0}) {
      for (long long k = 1; k <= 20; ++k) {
        const auto r = concentration_compare(h, total, k);
        CHECK(r.concentrated >= r.distributed * (1.0 - 1e-12));
      }
    }
  }
}

TEST_CASE("convexity probe") {
  CHECK(convexity_probe(HarmFunction::power(2.0), 1.0, 0.5) == doctest::Approx(0.5));
  CHECK(convexity_probe(HarmFunction::linear(1.0), 2.0, 1.0) == doctest::Approx(0.0));
  CHECK(convexity_probe(HarmFunction::power(0.5), 2.0, 1.0) < 0.0);
}

TEST_CASE("expected harm against closed-form moments") {
  const auto g = DistributionSpec::gaussian(0.0, 1.5);
  CHECK(expected_harm(HarmFunction::power(2.0), g) == doctest::Approx(2.25).epsilon(1e-9));
  CHECK(expected_harm(HarmFunction::linear(1.0), g) ==
        doctest::Approx(1.5 * std::sqrt(2.0 / special::kPi)).epsilon(1e-9));
  CHECK(expected_harm(HarmFunction::threshold(2.0), g) ==
        doctest::Approx(std::erfc(2.0 / 1.5 / std::sqrt(2.0))).epsilon(1e-9));
  CHECK(expected_harm(HarmFunction::linear(1.0), DistributionSpec::student_t(3.0)) ==
        doctest::Approx(2.0 * std::sqrt(3.0) / special::kPi).epsilon(1e-7));
  CHECK(expected_harm(HarmFunction::power(4.0), g) == doctest::Approx(3.0 * std::pow(1.5, 4)).epsilon(1e-9));
}

TEST_CASE("fragility measure") {
  const auto g = DistributionSpec::gaussian();
  CHECK(std::fabs(fragility_measure(HarmFunction::power(2.0), g, 1.0, 2.0) - 3.0) < 1e-6);
  CHECK(fragility_measure(HarmFunction::power(2.0), g, 1.0, 1.0) == 0.0);
  // Convex harm gives a nonnegative measure under every spread.
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    for (double hi : {1.1, 2.0, 5.0}) CHECK(fragility_measure(HarmFunction::power(p), g, 1.0, hi) >= 0.0);
  }
  CHECK_THROWS_AS(fragility_measure(HarmFunction::power(2.0), DistributionSpec::student_t(2.0), 1.0, 2.0),
                  DivergentMoment);
  CHECK_THROWS_AS(fragility_measure(HarmFunction::power(1.0), DistributionSpec::cauchy(), 1.0, 2.0), DivergentMoment);
  CHECK_NOTHROW(fragility_measure(HarmFunction::threshold(3.0), DistributionSpec::cauchy(), 1.0, 2.0));
  CHECK_THROWS_AS(fragility_measure(HarmFunction::power(2.0), DistributionSpec::exponential(), 1.0, 2.0),
                  DomainError);
}

TEST_CASE("1/n ruin equals brute-force enumeration for n <= 12") {
  for (int n = 1; n <= 12; ++n) {
    for (double theta : {0.25, 0.5, 0.75, 1.0, 1.0 / 3.0}) {
      const int needed = needed_failures(n, theta);
      for (double q : {0.125, 0.25, 0.5, 0.75}) {
        PortfolioSpec s{.n = n, .q = q, .correlation = PortfolioSpec::Correlation::independent, .rho = 0.0,
                        .theta = theta};
        const double brute = needed == 0 ? 1.0 : brute_force_ruin(n, q, needed);
        CHECK(one_over_n_ruin(s) == brute);
        for (double rho : {0.25, 0.5}) {
          s.correlation = PortfolioSpec::Correlation::common_shock;
          s.rho = rho;
          const double shared = q * (n >= needed ? 1.0 : 0.0) + (1.0 - q) * (needed == 0 ? 1.0 : 0.0);
          CHECK(one_over_n_ruin(s) == rho * shared + (1.0 - rho) * brute);
          s.correlation = PortfolioSpec::Correlation::independent;
          s.rho = 0.0;
        }
      }
      for (double q : {0.1, 0.37}) {
        const PortfolioSpec s{.n = n, .q = q, .correlation = PortfolioSpec::Correlation::independent, .rho = 0.0,
                              .theta = theta};
        const double brute = needed == 0 ? 1.0 : brute_force_ruin(n, q, needed);
        CHECK(one_over_n_ruin(s) == doctest::Approx(brute).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("1/n ruin monotonicity") {
  double prev = 1.0;
  for (int n = 1; n <= 40; ++n) {
    const double v = one_over_n_ruin({.n = n, .q = 0.3, .theta = 1.0});
    CHECK(v <= prev);
    prev = v;
  }
  prev = 0.0;
  for (double rho = 0.0; rho <= 1.0; rho += 0.1) {
    const double v = one_over_n_ruin({.n = 10, .q = 0.2, .correlation = PortfolioSpec::Correlation::common_shock,
                                      .rho = rho, .theta = 0.8});
    CHECK(v >= prev);
    prev = v;
  }
  CHECK_THROWS_AS(one_over_n_ruin({.n = 0, .q = 0.2}), DomainError);
}
