#pragma once

#include "ruinkit/random.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ruinkit {

enum class Family { gaussian, exponential, bernoulli, lognormal, pareto, student_t, cauchy };

std::string_view to_string(Family family) noexcept;
Family family_from_string(std::string_view name);

// A univariate law. Field use per family:
//   gaussian     location + scale * Z
//   exponential  location + scale * E, E ~ Exp(1)  (scale = 1/rate)
//   bernoulli    location + scale * B, B ~ Bernoulli(prob)
//   lognormal    exp(location + scale * Z)
//   pareto       survival (support_min / x)^tail_index for x >= support_min
//   student_t    location + scale * T, T ~ t with tail_index degrees of freedom
//   cauchy       location + scale * C; identical to student_t with tail_index 1
struct DistributionSpec {
  Family family = Family::gaussian;
  double location = 0.0;
  double scale = 1.0;
  double tail_index = 1.0;
  double support_min = 1.0;
  double prob = 0.5;

  static DistributionSpec gaussian(double mu = 0.0, double sigma = 1.0);
  static DistributionSpec exponential(double rate = 1.0, double shift = 0.0);
  static DistributionSpec bernoulli(double p, double low = 0.0, double high = 1.0);
  static DistributionSpec lognormal(double mu = 0.0, double sigma = 1.0);
  static DistributionSpec pareto(double alpha, double x_min = 1.0);
  static DistributionSpec student_t(double dof, double mu = 0.0, double sigma = 1.0);
  static DistributionSpec cauchy(double mu = 0.0, double sigma = 1.0);

  // Throws DomainError when a parameter is outside its domain.
  void validate() const;

  [[nodiscard]] bool two_tailed() const noexcept;
  [[nodiscard]] bool symmetric() const noexcept;
  // Degrees of freedom when the law is a (possibly degenerate) Student-t, else empty.
  [[nodiscard]] std::optional<double> student_dof() const noexcept;
  // Supremum of the finite absolute moment orders (infinity for light tails).
  [[nodiscard]] double moment_limit() const noexcept;

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

struct SampleSeries {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::optional<DistributionSpec> spec;
};

// P(X > x).
double survival(const DistributionSpec& spec, double x);
// P(X <= x), evaluated without cancellation deep in the lower tail.
double cdf(const DistributionSpec& spec, double x);
double density(const DistributionSpec& spec, double x);
// Generalised inverse inf{x : F(x) >= q}, q in (0,1).
double quantile(const DistributionSpec& spec, double q);

// One draw from an already-positioned stream.
double draw(const DistributionSpec& spec, Stream& stream);

// n draws from the substream ("sample") of seed.
SampleSeries sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);

struct ProbabilityEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
};

// Monte Carlo estimate of P(X_1 + ... + X_k > x).
ProbabilityEstimate sum_survival_mc(const DistributionSpec& spec, int k, double x, std::uint64_t replicates,
                                    std::uint64_t seed, unsigned threads = 0);

}  // namespace ruinkit
