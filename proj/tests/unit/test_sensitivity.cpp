#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ruinkit/errors.hpp"
#include "ruinkit/sensitivity.hpp"
#include "ruinkit/special.hpp"

#include <cmath>
#include <map>

using namespace ruinkit;

namespace {

double phi_lower(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double cauchy_lower(double z) { return 0.5 + std::atan(z) / special::kPi; }
double t2_lower(double z) { return 0.5 + z / (2.0 * std::sqrt(z * z + 2.0)); }

}  // namespace

TEST_CASE("per-period ruin against closed forms") {
  const auto g = DistributionSpec::gaussian();
  const auto t2 = DistributionSpec::student_t(2.0);
  const auto c = DistributionSpec::cauchy();
  for (double mu : {0.0, 1.0, 3.0}) {
    for (double sigma : {0.5, 1.0, 2.0, 4.0}) {
      const double z = (-10.0 - mu) / sigma;
      CHECK(per_period_ruin(g, mu, sigma, 10.0) == doctest::Approx(phi_lower(z)).epsilon(1e-12));
      CHECK(per_period_ruin(t2, mu, sigma, 10.0) == doctest::Approx(t2_lower(z)).epsilon(1e-12));
      CHECK(per_period_ruin(c, mu, sigma, 10.0) == doctest::Approx(cauchy_lower(z)).epsilon(1e-12));
    }
  }
  CHECK(std::fabs(per_period_ruin(g, 1.0, 1.0, 10.0) - 1.910659574498663e-28) < 1e-30);
  CHECK(std::fabs(per_period_ruin(c, 1.0, 1.0, 10.0) - 0.02885793837630446) < 1e-12);
}

TEST_CASE("scale sweep: monotone in sigma, horizon consistent, fixed row order") {
  const SweepConfig cfg;
  const auto rows = scale_sweep(cfg);
  REQUIRE(rows.size() == cfg.families.size() * cfg.uncertainty_grid.size());
  CHECK(rows.front().family == "gaussian");
  CHECK(rows[4].family == "student_t2");
  CHECK(rows.back().family == "cauchy");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    CHECK(r.horizon_ruin ==
          doctest::Approx(-std::expm1(static_cast<double>(cfg.horizon) * std::log1p(-r.per_period_ruin))).epsilon(1e-12));
    CHECK(r.mu == cfg.benefit);
    CHECK(r.ir == doctest::Approx(r.mu / r.sigma));
    if (i % cfg.uncertainty_grid.size() != 0) CHECK(r.per_period_ruin > rows[i - 1].per_period_ruin);
  }
}

TEST_CASE("information-ratio sweep: strictly decreasing in IR") {
  SweepConfig cfg;
  cfg.ir_grid = {0.0, 0.5, 1.0, 2.0, 5.0, 9.0};
  const auto rows = information_ratio_sweep(cfg);
  const auto m = cfg.ir_grid.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].mu == doctest::Approx(rows[i].ir * cfg.ir_sigma));
    if (i % m != 0) CHECK(rows[i].per_period_ruin < rows[i - 1].per_period_ruin);
  }
}

TEST_CASE("fat-over-thin ordering on a grid") {
  const auto g = DistributionSpec::gaussian();
  const auto t2 = DistributionSpec::student_t(2.0);
  const auto c = DistributionSpec::cauchy();
  for (double mu : {0.0, 0.5, 1.0, 2.0}) {
    for (double sigma : {0.25, 0.5, 1.0, 2.0}) {
      for (double k : {5.0, 10.0, 20.0, 40.0}) {
        const double z = (k + mu) / sigma;
        if (z < 5.0) continue;
        const double pg = per_period_ruin(g, mu, sigma, k);
        const double pt = per_period_ruin(t2, mu, sigma, k);
        const double pc = per_period_ruin(c, mu, sigma, k);
        CHECK(pc >= pt);
        CHECK(pt >= 10.0 * pg);
        // The Cauchy/t2 tail ratio tends to z/pi from below, so a factor 10 needs z >= 16.
        if (z >= 16.0) CHECK(pc >= 10.0 * pt);
      }
    }
  }
}

TEST_CASE("skepticism report compares the extreme scales") {
  const SweepConfig cfg;
  const auto rep = skepticism_report(cfg);
  REQUIRE(rep.size() == 3);
  for (const auto& e : rep) {
    CHECK(e.sigma_lo == 0.5);
    CHECK(e.sigma_hi == 4.0);
    CHECK(e.per_period_ratio == doctest::Approx(e.per_period_hi / e.per_period_lo));
    CHECK(e.per_period_ratio > 1.0);
  }
  // Thin tails are by far the most sensitive to added uncertainty.
  CHECK(rep[0].per_period_ratio > rep[1].per_period_ratio);
  CHECK(rep[1].per_period_ratio > rep[2].per_period_ratio);
}

TEST_CASE("sweep config validation") {
  SweepConfig cfg;
  cfg.uncertainty_grid = {};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SweepConfig{};
  cfg.barrier = -2.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SweepConfig{};
  cfg.uncertainty_grid = {1.0, -1.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(family_label(DistributionSpec::student_t(3.0)) == "student_t3");
}
