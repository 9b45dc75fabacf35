#pragma once

#include "ruinkit/distributions.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ruinkit {

enum class TailClass { thin, subexponential, infinite_variance, infinite_mean };

std::string_view to_string(TailClass c) noexcept;
TailClass tail_class_from_string(std::string_view name);
[[nodiscard]] constexpr bool is_fat(TailClass c) noexcept { return c != TailClass::thin; }

// Every ratio estimate must rest on at least this many tail exceedances.
inline constexpr std::uint64_t kMinTailExceedances = 100;
// Band around the subexponential limit 2 accepted for finite-x convolution ratios.
inline constexpr double kSubexpBandLow = 1.5;
inline constexpr double kSubexpBandHigh = 3.0;

struct RatioPoint {
  double x = 0.0;
  double ratio = 0.0;
  double stderr_ = 0.0;
  std::uint64_t exceedances = 0;
};

struct SumMaxPoint {
  int n = 1;
  double x = 0.0;
  double ratio_a = 0.0;  // P(S_n > x) / P(X > x)
  double stderr_a = 0.0;
  double ratio_b = 0.0;  // P(S_n > x) / P(M_n > x)
  double stderr_b = 0.0;
  std::uint64_t exceedances = 0;
};

struct MaxToSumPoint {
  std::size_t n = 0;
  double r = 0.0;
};

enum class Growth { stable, divergent };
std::string_view to_string(Growth g) noexcept;

struct ExpMomentPoint {
  double epsilon = 0.0;
  Growth verdict = Growth::stable;
  double mean = 0.0;  // running mean of exp(eps*x) over the full sample; inf on overflow
};

struct HillEstimate {
  double alpha = 0.0;
  double stderr_ = 0.0;
  std::size_t k = 0;
};

struct TailDiagnosticsReport {
  std::vector<RatioPoint> convolution_ratios;
  std::vector<SumMaxPoint> sum_max_ratios;
  double moment_order = 1.0;
  std::vector<MaxToSumPoint> max_to_sum_path;
  std::vector<ExpMomentPoint> exp_moment_probe;
  std::optional<HillEstimate> hill;
  std::optional<TailClass> tail_class;
  double band_low = kSubexpBandLow;
  double band_high = kSubexpBandHigh;
};

// Upper-tail ratio P(X1 + X2 > x) / P(X > x). The numerator is Monte Carlo,
// the denominator is the analytic survival. Two-tailed laws are used signed.
// Each x must exceed the 0.9 quantile of X.
std::vector<RatioPoint> convolution_ratio(const DistributionSpec& spec, std::span<const double> xs,
                                          std::uint64_t replicates, std::uint64_t seed, unsigned threads = 0);

// Sample version: values are folded by absolute value, shuffled with `seed`
// and paired consecutively; both tails of the ratio are empirical.
std::vector<RatioPoint> convolution_ratio(const SampleSeries& sample, std::span<const double> xs,
                                          std::uint64_t seed);

// Largest x for which the sample version has kMinTailExceedances in both the
// single-value and the pair-sum tails. Throws InsufficientTailData if that x
// falls below the 0.9 quantile.
double deepest_feasible_x(const SampleSeries& sample, std::uint64_t seed);

// Ratios (a) and (b) for S_n = X_1 + ... + X_n and M_n = max X_i.
// ratio_b is estimated as 1 + P(S_n > x >= M_n) / P(M_n > x), so it is exactly
// 1 when n = 1.
std::vector<SumMaxPoint> sum_max_ratio(const DistributionSpec& spec, int n, std::span<const double> xs,
                                       std::uint64_t replicates, std::uint64_t seed, unsigned threads = 0);

// Empirical q-quantile of S_n from `replicates` Monte Carlo sums.
double sum_quantile_mc(const DistributionSpec& spec, int n, double q, std::uint64_t replicates, std::uint64_t seed,
                       unsigned threads = 0);

// R_k(p) = max|X_i|^p / sum |X_i|^p over prefixes k = 1, 2, 4, ... and the full length.
std::vector<MaxToSumPoint> max_to_sum(std::span<const double> sample, double p);

std::size_t default_hill_k(std::size_t n);
// Hill estimator on the k largest of |X_i|; k defaults to floor(n^0.6).
HillEstimate hill_estimator(std::span<const double> sample, std::optional<std::size_t> k = std::nullopt);

std::vector<double> default_exp_epsilons();
// Running mean of exp(eps*|x|) at n/2 versus n; more than 10% relative change
// (or overflow) is reported as divergent.
std::vector<ExpMomentPoint> exp_moment_probe(std::span<const double> sample, std::span<const double> epsilons);

struct ClassificationInputs {
  std::optional<double> hill_alpha;
  // Final R_n(1) of the max-to-sum path.
  std::optional<double> max_to_sum_r1;
  // Convolution ratio at the deepest feasible x.
  std::optional<double> convolution_ratio;
  std::vector<Growth> exp_verdicts;
};

ClassificationInputs classification_inputs(const TailDiagnosticsReport& report);
TailClass classify_tail(const ClassificationInputs& inputs);

enum class Quadrant { I, II, III, IV };
enum class Scope { local, systemic };
std::string_view to_string(Quadrant q) noexcept;
std::string_view to_string(Scope s) noexcept;
Scope scope_from_string(std::string_view name);

struct QuadrantVerdict {
  Quadrant quadrant = Quadrant::I;
  TailClass tail_class = TailClass::thin;
  Scope scope = Scope::local;
  bool pp_applies = false;
};

QuadrantVerdict classify_quadrant(TailClass tail_class, Scope scope) noexcept;

struct SampleAnalysisOptions {
  double moment_order = 1.0;
  std::optional<std::size_t> hill_k;
  std::vector<double> epsilons = default_exp_epsilons();
  std::uint64_t seed = 0;
};

// Folds the sample, runs max-to-sum, Hill, the exponential-moment probe and
// the convolution ratio at the deepest feasible x (when feasible), then classifies.
TailDiagnosticsReport analyze_sample(const SampleSeries& sample, const SampleAnalysisOptions& options = {});

}  // namespace ruinkit
