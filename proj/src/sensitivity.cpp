#include "ruinkit/sensitivity.hpp"

#include "ruinkit/errors.hpp"
#include "ruinkit/ruin_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ruinkit {

namespace {

void check_grid(const std::vector<double>& grid, const char* name, bool positive) {
  if (grid.empty()) throw ConfigError(std::string(name) + " must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || (positive && !(grid[i] > 0.0))) {
      throw ConfigError(std::string(name) + " values must be finite" + (positive ? " and positive" : ""));
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError(std::string(name) + " must be strictly increasing");
  }
}

double horizon_ruin(double per_period, std::uint64_t horizon) {
  return repeated_exposure_ruin({.p = per_period, .n = horizon});
}

SweepRow make_row(const DistributionSpec& family, double mu, double sigma, const SweepConfig& c) {
  const double p = per_period_ruin(family, mu, sigma, c.barrier);
  return {.family = family_label(family),
          .mu = mu,
          .sigma = sigma,
          .ir = mu / sigma,
          .k = c.barrier,
          .per_period_ruin = p,
          .horizon_ruin = horizon_ruin(p, c.horizon)};
}

}  // namespace

void SweepConfig::validate() const {
  if (families.empty()) throw ConfigError("family set must not be empty");
  for (const auto& f : families) {
    if (f.family == Family::bernoulli) throw ConfigError("sweeps need a continuous location-scale family");
    f.validate();
  }
  if (!std::isfinite(benefit) || benefit < 0.0) throw ConfigError("benefit must be finite and >= 0");
  if (!(barrier > 0.0)) throw ConfigError("barrier K must be positive");
  if (barrier <= -benefit) throw ConfigError("barrier K must exceed -mu");
  if (!(ir_sigma > 0.0)) throw ConfigError("ir_sigma must be positive");
  check_grid(uncertainty_grid, "uncertainty_grid", true);
  check_grid(ir_grid, "ir_grid", false);
  if (ir_grid.front() < 0.0) throw ConfigError("ir_grid values must be >= 0");
}

std::string family_label(const DistributionSpec& spec) {
  if (spec.family == Family::student_t) {
    std::ostringstream os;
    os << "student_t" << spec.tail_index;
    return os.str();
  }
  return std::string(to_string(spec.family));
}

double per_period_ruin(const DistributionSpec& family, double mu, double sigma, double barrier) {
  if (barrier <= -mu) throw ConfigError("barrier K must exceed -mu");
  DistributionSpec s = family;
  s.location = mu;
  s.scale = sigma;
  return cdf(s, -barrier);
}

SweepResult scale_sweep(const SweepConfig& config) {
  config.validate();
  SweepResult rows;
  for (const auto& f : config.families) {
    for (double sigma : config.uncertainty_grid) rows.push_back(make_row(f, config.benefit, sigma, config));
  }
  return rows;
}

SweepResult information_ratio_sweep(const SweepConfig& config) {
  config.validate();
  SweepResult rows;
  for (const auto& f : config.families) {
    for (double ir : config.ir_grid) {
      SweepRow row = make_row(f, ir * config.ir_sigma, config.ir_sigma, config);
      row.ir = ir;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<SkepticismEntry> skepticism_report(const SweepConfig& config) {
  config.validate();
  const double lo = config.uncertainty_grid.front();
  const double hi = config.uncertainty_grid.back();
  std::vector<SkepticismEntry> out;
  for (const auto& f : config.families) {
    SkepticismEntry e;
    e.family = family_label(f);
    e.sigma_lo = lo;
    e.sigma_hi = hi;
    e.per_period_lo = per_period_ruin(f, config.benefit, lo, config.barrier);
    e.per_period_hi = per_period_ruin(f, config.benefit, hi, config.barrier);
    e.horizon_lo = horizon_ruin(e.per_period_lo, config.horizon);
    e.horizon_hi = horizon_ruin(e.per_period_hi, config.horizon);
    e.per_period_ratio = lo == hi ? 1.0 : e.per_period_hi / e.per_period_lo;
    e.horizon_ratio = lo == hi ? 1.0 : e.horizon_hi / e.horizon_lo;
    out.push_back(e);
  }
  return out;
}

}  // namespace ruinkit
