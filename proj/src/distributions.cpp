#include "ruinkit/distributions.hpp"

#include "ruinkit/errors.hpp"
#include "ruinkit/special.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace ruinkit {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 7> kFamilyNames{{
    {Family::gaussian, "gaussian"},
    {Family::exponential, "exponential"},
    {Family::bernoulli, "bernoulli"},
    {Family::lognormal, "lognormal"},
    {Family::pareto, "pareto"},
    {Family::student_t, "student_t"},
    {Family::cauchy, "cauchy"},
}};

constexpr double kInf = std::numeric_limits<double>::infinity();

double standardize(const DistributionSpec& s, double x) { return (x - s.location) / s.scale; }

// Bisection on the CDF of a standard Student-t; the bracket shrinks to 1e-12.
double student_t_quantile_numeric(double q, double dof) {
  double lo = -1.0;
  double hi = 1.0;
  while (special::student_t_sf(lo, dof) < 1.0 - q) lo *= 2.0;
  while (special::student_t_sf(hi, dof) > 1.0 - q) hi *= 2.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    // cdf(mid) >= q  <=>  sf(mid) <= 1 - q
    if (special::student_t_sf(mid, dof) <= 1.0 - q) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double standard_student_quantile(double q, double dof) {
  if (dof == 1.0) return std::tan(special::kPi * (q - 0.5));
  if (dof == 2.0) return (2.0 * q - 1.0) / std::sqrt(2.0 * q * (1.0 - q));
  return student_t_quantile_numeric(q, dof);
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  for (const auto& [f, name] : kFamilyNames) {
    if (f == family) return name;
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (const auto& [f, n] : kFamilyNames) {
    if (n == name) return f;
  }
  throw DomainError("unknown distribution family '" + std::string(name) + "'");
}

DistributionSpec DistributionSpec::gaussian(double mu, double sigma) {
  return {.family = Family::gaussian, .location = mu, .scale = sigma};
}
DistributionSpec DistributionSpec::exponential(double rate, double shift) {
  return {.family = Family::exponential, .location = shift, .scale = 1.0 / rate};
}
DistributionSpec DistributionSpec::bernoulli(double p, double low, double high) {
  return {.family = Family::bernoulli, .location = low, .scale = high - low, .prob = p};
}
DistributionSpec DistributionSpec::lognormal(double mu, double sigma) {
  return {.family = Family::lognormal, .location = mu, .scale = sigma};
}
DistributionSpec DistributionSpec::pareto(double alpha, double x_min) {
  return {.family = Family::pareto, .tail_index = alpha, .support_min = x_min};
}
DistributionSpec DistributionSpec::student_t(double dof, double mu, double sigma) {
  return {.family = Family::student_t, .location = mu, .scale = sigma, .tail_index = dof};
}
DistributionSpec DistributionSpec::cauchy(double mu, double sigma) {
  return {.family = Family::cauchy, .location = mu, .scale = sigma, .tail_index = 1.0};
}

void DistributionSpec::validate() const {
  if (!std::isfinite(location)) throw DomainError("location must be finite");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("scale must be strictly positive and finite");
  switch (family) {
    case Family::pareto:
      if (!(support_min > 0.0) || !std::isfinite(support_min)) {
        throw DomainError("pareto support_min must be strictly positive");
      }
      [[fallthrough]];
    case Family::student_t:
      if (!(tail_index > 0.0) || !std::isfinite(tail_index)) {
        throw DomainError("tail_index must be strictly positive");
      }
      break;
    case Family::bernoulli:
      if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("bernoulli prob must lie in [0,1]");
      break;
    default:
      break;
  }
}

bool DistributionSpec::two_tailed() const noexcept {
  return family == Family::gaussian || family == Family::student_t || family == Family::cauchy;
}

bool DistributionSpec::symmetric() const noexcept { return two_tailed(); }

std::optional<double> DistributionSpec::student_dof() const noexcept {
  if (family == Family::cauchy) return 1.0;
  if (family == Family::student_t) return tail_index;
  return std::nullopt;
}

double DistributionSpec::moment_limit() const noexcept {
  switch (family) {
    case Family::pareto:
    case Family::student_t:
      return tail_index;
    case Family::cauchy:
      return 1.0;
    default:
      return kInf;
  }
}

double survival(const DistributionSpec& s, double x) {
  s.validate();
  switch (s.family) {
    case Family::gaussian:
      return special::normal_sf(standardize(s, x));
    case Family::exponential:
      return x < s.location ? 1.0 : std::exp(-standardize(s, x));
    case Family::bernoulli:
      if (x < s.location) return 1.0;
      return x < s.location + s.scale ? s.prob : 0.0;
    case Family::lognormal:
      return x <= 0.0 ? 1.0 : special::normal_sf((std::log(x) - s.location) / s.scale);
    case Family::pareto:
      return x < s.support_min ? 1.0 : std::pow(s.support_min / x, s.tail_index);
    case Family::student_t:
    case Family::cauchy:
      return special::student_t_sf(standardize(s, x), *s.student_dof());
  }
  return 0.0;
}

double cdf(const DistributionSpec& s, double x) {
  s.validate();
  switch (s.family) {
    case Family::gaussian:
      return special::normal_cdf(standardize(s, x));
    case Family::exponential:
      return x < s.location ? 0.0 : -std::expm1(-standardize(s, x));
    case Family::bernoulli:
      if (x < s.location) return 0.0;
      return x < s.location + s.scale ? 1.0 - s.prob : 1.0;
    case Family::lognormal:
      return x <= 0.0 ? 0.0 : special::normal_cdf((std::log(x) - s.location) / s.scale);
    case Family::pareto:
      return x < s.support_min ? 0.0 : -std::expm1(s.tail_index * std::log(s.support_min / x));
    case Family::student_t:
    case Family::cauchy:
      return special::student_t_sf(-standardize(s, x), *s.student_dof());
  }
  return 0.0;
}

double density(const DistributionSpec& s, double x) {
  s.validate();
  switch (s.family) {
    case Family::gaussian: {
      const double z = standardize(s, x);
      return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * special::kPi) * s.scale);
    }
    case Family::exponential:
      return x < s.location ? 0.0 : std::exp(-standardize(s, x)) / s.scale;
    case Family::bernoulli:
      throw DomainError("bernoulli has no density");
    case Family::lognormal: {
      if (x <= 0.0) return 0.0;
      const double z = (std::log(x) - s.location) / s.scale;
      return std::exp(-0.5 * z * z) / (x * s.scale * std::sqrt(2.0 * special::kPi));
    }
    case Family::pareto:
      return x < s.support_min ? 0.0 : s.tail_index * std::pow(s.support_min / x, s.tail_index) / x;
    case Family::student_t:
    case Family::cauchy: {
      const double nu = *s.student_dof();
      const double z = standardize(s, x);
      const double log_norm =
          std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * special::kPi);
      return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(z * z / nu)) / s.scale;
    }
  }
  return 0.0;
}

double quantile(const DistributionSpec& s, double q) {
  s.validate();
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0,1)");
  switch (s.family) {
    case Family::gaussian:
      return s.location + s.scale * special::normal_quantile(q);
    case Family::exponential:
      return s.location - s.scale * std::log1p(-q);
    case Family::bernoulli:
      return q <= 1.0 - s.prob ? s.location : s.location + s.scale;
    case Family::lognormal:
      return std::exp(s.location + s.scale * special::normal_quantile(q));
    case Family::pareto:
      return s.support_min * std::exp(-std::log1p(-q) / s.tail_index);
    case Family::student_t:
    case Family::cauchy:
      return s.location + s.scale * standard_student_quantile(q, *s.student_dof());
  }
  return 0.0;
}

double draw(const DistributionSpec& s, Stream& stream) {
  switch (s.family) {
    case Family::gaussian:
      return s.location + s.scale * stream.standard_normal();
    case Family::exponential:
      return s.location + s.scale * stream.standard_exponential();
    case Family::bernoulli:
      return stream.uniform() < s.prob ? s.location + s.scale : s.location;
    case Family::lognormal:
      return std::exp(s.location + s.scale * stream.standard_normal());
    case Family::pareto:
      return s.support_min * std::pow(stream.uniform(), -1.0 / s.tail_index);
    case Family::student_t:
    case Family::cauchy: {
      const double nu = *s.student_dof();
      if (nu == 1.0 || nu == 2.0) return s.location + s.scale * standard_student_quantile(stream.uniform(), nu);
      const double z = stream.standard_normal();
      const double g = stream.gamma(0.5 * nu);
      return s.location + s.scale * z * std::sqrt(0.5 * nu / g);
    }
  }
  return 0.0;
}

SampleSeries sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  SampleSeries out{.values = {}, .seed = seed, .spec = spec};
  out.values.reserve(n);
  Stream stream = Stream(seed).child("sample");
  for (std::size_t i = 0; i < n; ++i) out.values.push_back(draw(spec, stream));
  return out;
}

ProbabilityEstimate sum_survival_mc(const DistributionSpec& spec, int k, double x, std::uint64_t replicates,
                                    std::uint64_t seed, unsigned threads) {
  spec.validate();
  if (k < 1) throw DomainError("summand count must be at least 1");
  if (replicates < 1) throw DomainError("replicates must be at least 1");
  const Stream root = Stream(seed).child("sum_survival");
  const auto parts = reduce_blocks<std::uint64_t>(replicates, threads, [&](std::uint64_t b, std::uint64_t e) {
    std::uint64_t local = 0;
    for (std::uint64_t r = b; r < e; ++r) {
      Stream st = root.child(r);
      double sum = 0.0;
      for (int i = 0; i < k; ++i) sum += draw(spec, st);
      local += sum > x ? 1 : 0;
    }
    return local;
  });
  std::uint64_t total = 0;
  for (auto h : parts) total += h;
  const double p = static_cast<double>(total) / static_cast<double>(replicates);
  return {.estimate = p,
          .stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(replicates)),
          .hits = total,
          .trials = replicates};
}

}  // namespace ruinkit
