#pragma once

#include "ruinkit/distributions.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ruinkit {

// Harm as a function of stressor intensity x >= 0, with harm(0) = 0 and
// harm nondecreasing. Built-in forms only:
//   power:p      x^p
//   linear:a     a*x
//   threshold:t  0 below t, 1 at or above t
//   table        piecewise linear through (x, h) points, flat past the last point
class HarmFunction {
 public:
  enum class Kind { power, linear, threshold, table };

  static HarmFunction power(double exponent);
  static HarmFunction linear(double slope);
  static HarmFunction threshold(double level);
  static HarmFunction table(std::vector<std::pair<double, double>> points);
  // Parses power:p / linear:a / threshold:t / table:path (CSV with header x,h).
  static HarmFunction parse(std::string_view text);

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double parameter() const noexcept { return param_; }
  // Destruction threshold: the largest intensity the form is defined for.
  [[nodiscard]] double domain_max() const noexcept;
  // Polynomial growth order of harm at infinity (0 for bounded forms).
  [[nodiscard]] double growth_order() const noexcept;
  // Points where harm is not smooth.
  [[nodiscard]] std::vector<double> breakpoints() const;
  [[nodiscard]] std::string describe() const;

 private:
  HarmFunction(Kind kind, double param) : kind_(kind), param_(param) {}

  Kind kind_;
  double param_;
  std::vector<std::pair<double, double>> points_;
};

// h(x+d) + h(x-d) - 2h(x); positive means locally convex (fragile).
double convexity_probe(const HarmFunction& h, double x, double delta);

struct ConcentrationResult {
  double concentrated = 0.0;  // h(total)
  double distributed = 0.0;   // k * h(total / k)
};
ConcentrationResult concentration_compare(const HarmFunction& h, double total, long long k);

// E[h(|X|)] under scale sigma_hi minus under sigma_lo, location fixed.
// Needs a symmetric location-scale family. Throws DivergentMoment when
// E[h(|X|)] is infinite. `resolution` is the panel count per integration segment.
double fragility_measure(const HarmFunction& h, const DistributionSpec& spec, double sigma_lo, double sigma_hi,
                         int resolution = 200);

// E[h(|X|)] itself, same quadrature.
double expected_harm(const HarmFunction& h, const DistributionSpec& spec, int resolution = 200);

struct PortfolioSpec {
  enum class Correlation { independent, common_shock };

  int n = 1;
  double q = 0.0;      // per-source failure probability
  Correlation correlation = Correlation::independent;
  double rho = 0.0;    // probability that all sources share one failure draw
  double theta = 1.0;  // failed fraction that constitutes ruin

  void validate() const;
};

// Exact ruin probability of the equal split across n sources.
double one_over_n_ruin(const PortfolioSpec& spec);

}  // namespace ruinkit
