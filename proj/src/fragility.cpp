#include "ruinkit/fragility.hpp"

#include "ruinkit/errors.hpp"
#include "ruinkit/special.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ruinkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_number(std::string_view text, std::string_view what) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("invalid " + std::string(what) + " '" + s + "'");
  return v;
}

std::vector<std::pair<double, double>> read_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open harm table '" + path + "'");
  std::string line;
  std::vector<std::pair<double, double>> points;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "x,h") throw ConfigError("harm table '" + path + "' must start with header x,h");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("malformed harm table row '" + line + "'");
    points.emplace_back(parse_number(std::string_view(line).substr(0, comma), "table x"),
                        parse_number(std::string_view(line).substr(comma + 1), "table h"));
  }
  return points;
}

}  // namespace

HarmFunction HarmFunction::power(double exponent) {
  if (!(exponent > 0.0) || !std::isfinite(exponent)) throw DomainError("power harm needs an exponent > 0");
  return {Kind::power, exponent};
}

HarmFunction HarmFunction::linear(double slope) {
  if (!(slope >= 0.0) || !std::isfinite(slope)) throw DomainError("linear harm needs a slope >= 0");
  return {Kind::linear, slope};
}

HarmFunction HarmFunction::threshold(double level) {
  if (!(level > 0.0) || !std::isfinite(level)) throw DomainError("threshold harm needs a level > 0");
  return {Kind::threshold, level};
}

HarmFunction HarmFunction::table(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw DomainError("harm table must have at least one point");
  if (points.front().first > 0.0) points.insert(points.begin(), {0.0, 0.0});
  if (points.front().first != 0.0 || points.front().second != 0.0) {
    throw DomainError("harm table must satisfy h(0) = 0");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].first > points[i - 1].first)) throw DomainError("harm table x must be strictly increasing");
    if (points[i].second < points[i - 1].second) throw DomainError("harm table h must be nondecreasing");
  }
  HarmFunction h(Kind::table, 0.0);
  h.points_ = std::move(points);
  return h;
}

HarmFunction HarmFunction::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("harm form must be name:value, got '" + std::string(text) + "'");
  const auto name = text.substr(0, colon);
  const auto arg = text.substr(colon + 1);
  if (name == "power") return power(parse_number(arg, "power exponent"));
  if (name == "linear") return linear(parse_number(arg, "linear slope"));
  if (name == "threshold") return threshold(parse_number(arg, "threshold level"));
  if (name == "table") return table(read_table_csv(std::string(arg)));
  throw ConfigError("unknown harm form '" + std::string(name) + "'");
}

double HarmFunction::operator()(double x) const {
  if (x < 0.0 || std::isnan(x)) throw DomainError("harm is defined for intensities >= 0");
  switch (kind_) {
    case Kind::power:
      return std::pow(x, param_);
    case Kind::linear:
      return param_ * x;
    case Kind::threshold:
      return x >= param_ ? 1.0 : 0.0;
    case Kind::table: {
      if (x >= points_.back().first) return points_.back().second;
      const auto it = std::upper_bound(points_.begin(), points_.end(), x,
                                       [](double v, const auto& p) { return v < p.first; });
      const auto& [x1, h1] = *it;
      const auto& [x0, h0] = *(it - 1);
      return h0 + (h1 - h0) * (x - x0) / (x1 - x0);
    }
  }
  return 0.0;
}

double HarmFunction::domain_max() const noexcept { return kind_ == Kind::table ? points_.back().first : kInf; }

double HarmFunction::growth_order() const noexcept {
  switch (kind_) {
    case Kind::power:
      return param_;
    case Kind::linear:
      return param_ > 0.0 ? 1.0 : 0.0;
    default:
      return 0.0;
  }
}

std::vector<double> HarmFunction::breakpoints() const {
  if (kind_ == Kind::threshold) return {param_};
  std::vector<double> out;
  if (kind_ == Kind::table) {
    for (const auto& p : points_) out.push_back(p.first);
  }
  return out;
}

std::string HarmFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::power:
      os << "power:" << param_;
      break;
    case Kind::linear:
      os << "linear:" << param_;
      break;
    case Kind::threshold:
      os << "threshold:" << param_;
      break;
    case Kind::table:
      os << "table[" << points_.size() << "]";
      break;
  }
  return os.str();
}

double convexity_probe(const HarmFunction& h, double x, double delta) {
  if (!(delta > 0.0)) throw DomainError("probe delta must be positive");
  if (x - delta < 0.0 || x + delta > h.domain_max()) {
    throw DomainError("probe window [x-delta, x+delta] leaves the harm domain");
  }
  return h(x + delta) + h(x - delta) - 2.0 * h(x);
}

ConcentrationResult concentration_compare(const HarmFunction& h, double total, long long k) {
  if (k < 1) throw DomainError("k must be at least 1");
  if (total < 0.0 || total > h.domain_max()) throw DomainError("total stress must lie in [0, domain_max]");
  return {.concentrated = h(total), .distributed = static_cast<double>(k) * h(total / static_cast<double>(k))};
}

double expected_harm(const HarmFunction& h, const DistributionSpec& spec, int resolution) {
  spec.validate();
  if (!spec.symmetric()) throw DomainError("expected harm needs a symmetric location-scale family");
  if (resolution < 1) throw DomainError("quadrature resolution must be at least 1");
  if (h.growth_order() > 0.0 && h.growth_order() >= spec.moment_limit()) {
    throw DivergentMoment("E[h(|X|)] diverges: harm grows like x^" + std::to_string(h.growth_order()) + " but " +
                          std::string(to_string(spec.family)) + " has moments only below order " +
                          std::to_string(spec.moment_limit()));
  }
  auto integrand = [&](double x) { return h(std::fabs(x)) * density(spec, x); };

  std::vector<double> cuts = {0.0, spec.location};
  for (double b : h.breakpoints()) {
    cuts.push_back(b);
    cuts.push_back(-b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += special::integrate(integrand, cuts[i], cuts[i + 1], resolution);
  }
  // Half-lines via x = a +- s (v^-3 - 1), v in (0, 1]; the cubic grading tames
  // power-law tails of the integrand near v = 0.
  const double s = spec.scale;
  auto tail = [&](double anchor, double sign) {
    return special::integrate(
        [&](double v) {
          const double x = anchor + sign * s * (1.0 / (v * v * v) - 1.0);
          const double jac = 3.0 * s / (v * v * v * v);
          const double f = integrand(x);
          return f == 0.0 ? 0.0 : f * jac;
        },
        0.0, 1.0, resolution);
  };
  total += tail(cuts.back(), 1.0);
  total += tail(cuts.front(), -1.0);
  return total;
}

double fragility_measure(const HarmFunction& h, const DistributionSpec& spec, double sigma_lo, double sigma_hi,
                         int resolution) {
  if (!(sigma_lo > 0.0)) throw DomainError("sigma_lo must be positive");
  if (sigma_hi < sigma_lo) throw DomainError("sigma_hi must not be below sigma_lo");
  if (sigma_hi == sigma_lo) {
    expected_harm(h, spec, resolution);  // still reports divergence
    return 0.0;
  }
  DistributionSpec lo = spec;
  DistributionSpec hi = spec;
  lo.scale = sigma_lo;
  hi.scale = sigma_hi;
  return expected_harm(h, hi, resolution) - expected_harm(h, lo, resolution);
}

void PortfolioSpec::validate() const {
  if (n < 1) throw DomainError("portfolio needs at least one source");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("per-source failure probability must lie in [0,1]");
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("rho must lie in [0,1]");
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("theta must lie in [0,1]");
}

double one_over_n_ruin(const PortfolioSpec& spec) {
  spec.validate();
  // Smallest failure count that is ruinous: ceil(theta * n), tolerant of theta*n rounding up.
  const double scaled = spec.theta * spec.n;
  auto needed = static_cast<int>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled)));
  needed = std::clamp(needed, 0, spec.n);
  if (needed == 0) return 1.0;

  double independent = 0.0;
  const double q = spec.q;
  for (int j = needed; j <= spec.n; ++j) {
    double term = 0.0;
    if (spec.n <= 60) {
      double binom = 1.0;
      for (int i = 1; i <= j; ++i) binom = binom * (spec.n - j + i) / i;
      term = binom * std::pow(q, j) * std::pow(1.0 - q, spec.n - j);
    } else if (q > 0.0 && q < 1.0) {
      const double log_term = std::lgamma(spec.n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(spec.n - j + 1.0) +
                              j * std::log(q) + (spec.n - j) * std::log1p(-q);
      term = std::exp(log_term);
    } else {
      term = (q == 1.0 && j == spec.n) ? 1.0 : 0.0;
    }
    independent += term;
  }
  independent = std::min(independent, 1.0);
  if (spec.correlation == PortfolioSpec::Correlation::independent) return independent;
  return spec.rho * q + (1.0 - spec.rho) * independent;
}

}  // namespace ruinkit
