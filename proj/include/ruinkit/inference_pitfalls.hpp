#pragma once

#include "ruinkit/distributions.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>

namespace ruinkit {

enum class PairingMode { paired, independent };

struct MomentBlock {
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> cv;  // mean / sd; empty when the sd is zero
};

struct ComparisonReport {
  // Statistics of the difference sample X - Y.
  MomentBlock correct;
  // Differences of the separate statistics: E(X)-E(Y), Var(X)-Var(Y), cv(X)-cv(Y).
  MomentBlock naive;
  std::size_t pairs = 0;
  bool cv_undefined = false;
  bool naive_variance_negative = false;
  bool variance_mismatch = false;  // naive variance differs from correct by more than 10%
  bool cv_mismatch = false;
};

// Paired mode needs equal lengths and differences element-wise. Independent
// mode pairs max(len x, len y) bootstrap draws from each sample (seeded).
ComparisonReport difference_stats(std::span<const double> x, std::span<const double> y,
                                  PairingMode mode = PairingMode::paired, std::uint64_t seed = 0);

struct TwoTestReport {
  double effect_x = 0.0;
  double effect_y = 0.0;
  int n_per_group = 0;
  double alpha = 0.05;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  // "Exactly one of the two effects is significant" read as a difference.
  double incorrect_rate = 0.0;
  // Direct z-test on the difference of effects.
  double correct_rate = 0.0;
  // Empirical per-test rejection rates.
  double power_x = 0.0;
  double power_y = 0.0;
};

// Two independent two-group experiments per replicate, unit-variance gaussian
// observations, two-sided z-tests at level alpha.
TwoTestReport two_test_fallacy_sim(double effect_x, double effect_y, int n_per_group, double alpha,
                                   std::uint64_t replicates, std::uint64_t seed, unsigned threads = 0);

// Effect that gives a two-sided z-test of two groups of size n the requested power
// (ignoring the opposite tail).
double effect_for_power(double power, int n_per_group, double alpha);

struct LuckQuadrant {
  const char* name = "";
  double frequency = 0.0;
  double mean_gap = 0.0;  // mean |outcome_a - outcome_b|; 0 when the quadrant is empty
  std::uint64_t count = 0;
};

struct LuckReport {
  double p_luck = 0.5;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  // lucky-lucky, unlucky-unlucky, lucky-unlucky, unlucky-lucky
  std::array<LuckQuadrant, 4> quadrants;
};

// Each person's outcome is +luck_size (lucky) or -luck_size (unlucky) plus
// standard gaussian noise.
LuckReport luck_quadrant_sim(double p_luck, std::uint64_t replicates, std::uint64_t seed, double luck_size = 1.0);

}  // namespace ruinkit
