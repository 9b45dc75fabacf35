#pragma once

#include "ruinkit/distributions.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ruinkit {

// Repeated independent exposures, each ruinous with probability p.
struct ExposurePolicy {
  double p = 0.0;
  std::uint64_t n = 0;

  void validate() const;
};

// W_{t+1} = W_t + X_t with X_t ~ step. Ruin when W_t <= barrier at an integer
// step; reaching upper_barrier (when set) ends the run as a survivor.
struct WalkSpec {
  double start = 1.0;
  DistributionSpec step;
  double barrier = 0.0;
  std::optional<double> upper_barrier;
  // Absent means unbounded, capped at max_steps.
  std::optional<std::uint64_t> horizon;
  std::uint64_t max_steps = 1'000'000;

  void validate() const;
  [[nodiscard]] std::uint64_t step_limit() const noexcept { return horizon.value_or(max_steps); }
};

struct HistogramBin {
  std::uint64_t lo = 0;  // inclusive
  std::uint64_t hi = 0;  // exclusive
  std::uint64_t count = 0;
};

struct RuinReport {
  double ruin_probability = 0.0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  std::vector<HistogramBin> time_to_ruin;  // absorbed runs only; edges 1,2,4,8,...
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  std::uint64_t ruined = 0;
  std::uint64_t exited_upper = 0;
  // Runs still alive at the step cap of an unbounded horizon (counted as survival).
  std::uint64_t surviving_at_cap = 0;
};

// 1 - (1-p)^n, evaluated as -expm1(n log1p(-p)).
double repeated_exposure_ruin(const ExposurePolicy& policy);

// Smallest n with 1 - (1-p)^n >= target.
std::uint64_t exposures_to_ruin_level(double p, double target);

// Exact ruin probability of the +-1 walk from a (upper barrier N, if any) with
// up-step probability p_up.
double gambler_ruin_closed_form(long long start, std::optional<long long> upper, double p_up);

// Wilson score interval at 95%.
std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t trials);

RuinReport simulate_absorbing_walk(const WalkSpec& spec, std::uint64_t replicates, std::uint64_t seed,
                                   unsigned threads = 0);

// Same walks, recorded step by step for inspection: each path has
// step_limit()+1 entries and holds its absorbed value after ruin.
std::vector<std::vector<double>> simulate_walk_paths(const WalkSpec& spec, std::uint64_t replicates,
                                                     std::uint64_t seed);

// Direct simulation of policy.n Bernoulli(p) exposures per replicate.
RuinReport simulate_repeated_exposure(const ExposurePolicy& policy, std::uint64_t replicates, std::uint64_t seed,
                                      unsigned threads = 0);

// A +-1 walk as a WalkSpec: bernoulli steps on {-1, +1}.
WalkSpec unit_step_walk(long long start, std::optional<long long> upper, double p_up);

}  // namespace ruinkit
