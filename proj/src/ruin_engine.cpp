#include "ruinkit/ruin_engine.hpp"

#include "ruinkit/errors.hpp"

#include <bit>
#include <cmath>

namespace ruinkit {

namespace {

// Outcome codes per replicate: ruin time t >= 1, or one of these.
constexpr std::uint64_t kSurvivedHorizon = 0;
constexpr std::uint64_t kExitedUpper = ~std::uint64_t{0};
constexpr std::uint64_t kSurvivedCap = ~std::uint64_t{0} - 1;

std::uint64_t run_walk(const WalkSpec& spec, Stream& st, std::vector<double>* path) {
  const std::uint64_t limit = spec.step_limit();
  double w = spec.start;
  if (path) path->push_back(w);
  for (std::uint64_t t = 1; t <= limit; ++t) {
    w += draw(spec.step, st);
    if (path) path->push_back(w);
    if (w <= spec.barrier) {
      if (path) path->resize(limit + 1, w);
      return t;
    }
    if (spec.upper_barrier && w >= *spec.upper_barrier) {
      if (path) path->resize(limit + 1, w);
      return kExitedUpper;
    }
  }
  return spec.horizon ? kSurvivedHorizon : kSurvivedCap;
}

RuinReport summarize(const std::vector<std::uint64_t>& outcomes, std::uint64_t seed) {
  RuinReport rep;
  rep.replicates = outcomes.size();
  rep.seed = seed;
  std::vector<std::uint64_t> bins;
  for (std::uint64_t o : outcomes) {
    if (o == kExitedUpper) {
      ++rep.exited_upper;
    } else if (o == kSurvivedCap) {
      ++rep.surviving_at_cap;
    } else if (o != kSurvivedHorizon) {
      ++rep.ruined;
      const auto bin = static_cast<std::size_t>(std::bit_width(o) - 1);  // floor(log2 t)
      if (bins.size() <= bin) bins.resize(bin + 1, 0);
      ++bins[bin];
    }
  }
  for (std::size_t b = 0; b < bins.size(); ++b) {
    rep.time_to_ruin.push_back({.lo = std::uint64_t{1} << b, .hi = std::uint64_t{1} << (b + 1), .count = bins[b]});
  }
  if (rep.replicates > 0) {
    rep.ruin_probability = static_cast<double>(rep.ruined) / static_cast<double>(rep.replicates);
    std::tie(rep.ci95_lo, rep.ci95_hi) = wilson_interval(rep.ruined, rep.replicates);
  }
  return rep;
}

}  // namespace

void ExposurePolicy::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("per-exposure ruin probability must lie in [0,1]");
}

void WalkSpec::validate() const {
  step.validate();
  if (!(start > barrier)) throw DomainError("walk start must lie strictly above the absorbing barrier");
  if (upper_barrier && !(start < *upper_barrier)) {
    throw DomainError("walk start must lie strictly below the upper barrier");
  }
  if (step_limit() == 0) throw DomainError("walk horizon must be at least one step");
}

double repeated_exposure_ruin(const ExposurePolicy& policy) {
  policy.validate();
  if (policy.n == 0 || policy.p == 0.0) return 0.0;
  if (policy.p == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(policy.n) * std::log1p(-policy.p));
}

std::uint64_t exposures_to_ruin_level(double p, double target) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("per-exposure probability must lie in (0,1)");
  if (!(target > 0.0 && target < 1.0)) throw DomainError("target ruin level must lie in (0,1)");
  const double estimate = std::ceil(std::log1p(-target) / std::log1p(-p));
  auto n = static_cast<std::uint64_t>(std::max(1.0, estimate));
  // Guard the rounding of the ceiling in both directions.
  while (n > 1 && repeated_exposure_ruin({p, n - 1}) >= target) --n;
  while (repeated_exposure_ruin({p, n}) < target) ++n;
  return n;
}

double gambler_ruin_closed_form(long long start, std::optional<long long> upper, double p_up) {
  if (start <= 0) throw DomainError("start must be strictly above the absorbing barrier 0");
  if (upper && *upper <= start) throw DomainError("start must be strictly below the upper barrier");
  if (!(p_up >= 0.0 && p_up <= 1.0)) throw DomainError("p_up must lie in [0,1]");
  if (p_up == 0.0) return 1.0;
  if (p_up == 1.0) return 0.0;
  const double q = 1.0 - p_up;
  const auto a = static_cast<double>(start);
  if (p_up == 0.5) return upper ? 1.0 - a / static_cast<double>(*upper) : 1.0;
  const double log_r = std::log(q / p_up);
  if (!upper) return p_up > 0.5 ? std::exp(a * log_r) : 1.0;
  const auto big_n = static_cast<double>(*upper);
  // ((r^a - r^N) / (1 - r^N)), rewritten for r > 1 to avoid overflow.
  if (log_r < 0.0) return (std::exp(a * log_r) - std::exp(big_n * log_r)) / (1.0 - std::exp(big_n * log_r));
  return (std::exp((a - big_n) * log_r) - 1.0) / (std::exp(-big_n * log_r) - 1.0);
}

std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const auto n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

RuinReport simulate_absorbing_walk(const WalkSpec& spec, std::uint64_t replicates, std::uint64_t seed,
                                   unsigned threads) {
  spec.validate();
  if (replicates < 1) throw DomainError("replicates must be at least 1");
  std::vector<std::uint64_t> outcomes(replicates);
  const Stream root = Stream(seed).child("absorbing_walk");
  parallel_blocks(replicates, threads, [&](std::uint64_t b, std::uint64_t e, unsigned) {
    for (std::uint64_t r = b; r < e; ++r) {
      Stream st = root.child(r);
      outcomes[r] = run_walk(spec, st, nullptr);
    }
  });
  return summarize(outcomes, seed);
}

std::vector<std::vector<double>> simulate_walk_paths(const WalkSpec& spec, std::uint64_t replicates,
                                                     std::uint64_t seed) {
  spec.validate();
  std::vector<std::vector<double>> paths(replicates);
  const Stream root = Stream(seed).child("absorbing_walk");
  for (std::uint64_t r = 0; r < replicates; ++r) {
    Stream st = root.child(r);
    paths[r].reserve(spec.step_limit() + 1);
    run_walk(spec, st, &paths[r]);
  }
  return paths;
}

RuinReport simulate_repeated_exposure(const ExposurePolicy& policy, std::uint64_t replicates, std::uint64_t seed,
                                      unsigned threads) {
  policy.validate();
  if (replicates < 1) throw DomainError("replicates must be at least 1");
  std::vector<std::uint64_t> outcomes(replicates, kSurvivedHorizon);
  const Stream root = Stream(seed).child("repeated_exposure");
  parallel_blocks(replicates, threads, [&](std::uint64_t b, std::uint64_t e, unsigned) {
    for (std::uint64_t r = b; r < e; ++r) {
      Stream st = root.child(r);
      for (std::uint64_t t = 1; t <= policy.n; ++t) {
        if (st.uniform() < policy.p) {
          outcomes[r] = t;
          break;
        }
      }
    }
  });
  return summarize(outcomes, seed);
}

WalkSpec unit_step_walk(long long start, std::optional<long long> upper, double p_up) {
  WalkSpec spec;
  spec.start = static_cast<double>(start);
  spec.step = DistributionSpec::bernoulli(p_up, -1.0, 1.0);
  spec.barrier = 0.0;
  if (upper) spec.upper_barrier = static_cast<double>(*upper);
  return spec;
}

}  // namespace ruinkit
