#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ruinkit::special {

inline constexpr double kPi = 3.14159265358979323846;

// Standard normal lower and upper tail, both accurate deep in their own tail.
double normal_cdf(double z) noexcept;
double normal_sf(double z) noexcept;
// Wichura's AS241 (PPND16), relative accuracy about 1e-16.
double normal_quantile(double p) noexcept;

// Student-t with `dof` degrees of freedom, standard location/scale.
// Upper tail P(T > t); dof in {1, 2} use closed forms.
double student_t_sf(double t, double dof);

// Gauss-Legendre rule of the given order on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int order);

// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
double integrate(const std::function<double(double)>& f, double a, double b, int panels, int order = 20);

}  // namespace ruinkit::special
