#pragma once

#include "ruinkit/distributions.hpp"

#include <string>
#include <vector>

namespace ruinkit {

// One family template per entry; location and scale are overwritten by the sweeps.
struct SweepConfig {
  std::vector<DistributionSpec> families = {DistributionSpec::gaussian(), DistributionSpec::student_t(2.0),
                                            DistributionSpec::cauchy()};
  double benefit = 1.0;
  std::vector<double> uncertainty_grid = {0.5, 1.0, 2.0, 4.0};
  std::vector<double> ir_grid = {0.0, 0.5, 1.0, 2.0, 5.0, 10.0};
  // Scale used by the information-ratio sweep.
  double ir_sigma = 1.0;
  double barrier = 10.0;  // K: a single-period loss below -K is ruin
  std::uint64_t horizon = 1000;

  void validate() const;
};

struct SweepRow {
  std::string family;
  double mu = 0.0;
  double sigma = 0.0;
  double ir = 0.0;
  double k = 0.0;
  double per_period_ruin = 0.0;
  double horizon_ruin = 0.0;
};

using SweepResult = std::vector<SweepRow>;

// Label used in output rows: gaussian, student_t2, cauchy, ...
std::string family_label(const DistributionSpec& spec);

// P(X <= -K) for X = mu + sigma * Z_family.
double per_period_ruin(const DistributionSpec& family, double mu, double sigma, double barrier);

// Rows ordered by family (config order) then sigma.
SweepResult scale_sweep(const SweepConfig& config);
// Rows ordered by family then IR, with mu = IR * ir_sigma.
SweepResult information_ratio_sweep(const SweepConfig& config);

struct SkepticismEntry {
  std::string family;
  double sigma_lo = 0.0;
  double sigma_hi = 0.0;
  double per_period_lo = 0.0;
  double per_period_hi = 0.0;
  double horizon_lo = 0.0;
  double horizon_hi = 0.0;
  double per_period_ratio = 1.0;
  double horizon_ratio = 1.0;
};

// Effect of moving from the smallest to the largest sigma of the grid, per family.
std::vector<SkepticismEntry> skepticism_report(const SweepConfig& config);

}  // namespace ruinkit
