#include "ruinkit/tail_diagnostics.hpp"

#include "ruinkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

namespace ruinkit {

namespace {

std::vector<double> folded(std::span<const double> values) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](double v) { return std::fabs(v); });
  return out;
}

void shuffle(std::vector<double>& v, std::uint64_t seed) {
  Stream st = Stream(seed).child("pairing");
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(st.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

// Sums of consecutive pairs of a shuffled copy, sorted ascending.
std::vector<double> pair_sums(const std::vector<double>& values, std::uint64_t seed) {
  std::vector<double> shuffled = values;
  shuffle(shuffled, seed);
  std::vector<double> sums;
  sums.reserve(shuffled.size() / 2);
  for (std::size_t i = 0; i + 1 < shuffled.size(); i += 2) sums.push_back(shuffled[i] + shuffled[i + 1]);
  std::sort(sums.begin(), sums.end());
  return sums;
}

std::uint64_t count_above(const std::vector<double>& sorted, double x) {
  return static_cast<std::uint64_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x));
}

// log P(X <= x), accurate in either tail.
double log_cdf(const DistributionSpec& spec, double x) {
  const double sf = survival(spec, x);
  return sf < 0.5 ? std::log1p(-sf) : std::log(cdf(spec, x));
}

RatioPoint ratio_from_sorted(const std::vector<double>& singles, const std::vector<double>& sums, double x) {
  const std::uint64_t den_hits = count_above(singles, x);
  const std::uint64_t num_hits = count_above(sums, x);
  const std::uint64_t hits = std::min(den_hits, num_hits);
  if (hits < kMinTailExceedances) throw InsufficientTailData(x, static_cast<long long>(hits), kMinTailExceedances);
  const double a = static_cast<double>(num_hits) / static_cast<double>(sums.size());
  const double b = static_cast<double>(den_hits) / static_cast<double>(singles.size());
  const double r = a / b;
  const double rel_var = (1.0 - a) / (static_cast<double>(sums.size()) * a) +
                         (1.0 - b) / (static_cast<double>(singles.size()) * b);
  return {.x = x, .ratio = r, .stderr_ = r * std::sqrt(rel_var), .exceedances = hits};
}

}  // namespace

std::string_view to_string(TailClass c) noexcept {
  switch (c) {
    case TailClass::thin:
      return "thin";
    case TailClass::subexponential:
      return "subexponential";
    case TailClass::infinite_variance:
      return "infinite_variance";
    case TailClass::infinite_mean:
      return "infinite_mean";
  }
  return "unknown";
}

TailClass tail_class_from_string(std::string_view name) {
  if (name == "thin") return TailClass::thin;
  if (name == "subexponential" || name == "subexp") return TailClass::subexponential;
  if (name == "infinite_variance" || name == "inf-var") return TailClass::infinite_variance;
  if (name == "infinite_mean" || name == "inf-mean") return TailClass::infinite_mean;
  throw DomainError("unknown tail class '" + std::string(name) + "'");
}

std::string_view to_string(Growth g) noexcept { return g == Growth::stable ? "stable" : "divergent"; }

std::vector<RatioPoint> convolution_ratio(const DistributionSpec& spec, std::span<const double> xs,
                                          std::uint64_t replicates, std::uint64_t seed, unsigned threads) {
  spec.validate();
  if (replicates < 1) throw DomainError("replicates must be at least 1");
  const double q90 = quantile(spec, 0.9);
  for (double x : xs) {
    if (!(x > q90)) {
      throw DomainError("x=" + std::to_string(x) + " is not above the 0.9 quantile (" + std::to_string(q90) + ")");
    }
  }
  const Stream root = Stream(seed).child("convolution_ratio");
  using Counts = std::vector<std::uint64_t>;
  const auto parts = reduce_blocks<Counts>(replicates, threads, [&](std::uint64_t b, std::uint64_t e) {
    Counts counts(xs.size(), 0);
    for (std::uint64_t r = b; r < e; ++r) {
      Stream st = root.child(r);
      const double s = draw(spec, st) + draw(spec, st);
      for (std::size_t i = 0; i < xs.size(); ++i) counts[i] += s > xs[i] ? 1 : 0;
    }
    return counts;
  });
  std::vector<RatioPoint> out;
  const auto reps = static_cast<double>(replicates);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::uint64_t hits = 0;
    for (const auto& c : parts) hits += c[i];
    if (hits < kMinTailExceedances) {
      throw InsufficientTailData(xs[i], static_cast<long long>(hits), kMinTailExceedances);
    }
    const double p = static_cast<double>(hits) / reps;
    const double sf = survival(spec, xs[i]);
    out.push_back({.x = xs[i],
                   .ratio = p / sf,
                   .stderr_ = std::sqrt(p * (1.0 - p) / reps) / sf,
                   .exceedances = hits});
  }
  return out;
}

std::vector<RatioPoint> convolution_ratio(const SampleSeries& sample, std::span<const double> xs, std::uint64_t seed) {
  std::vector<double> singles = folded(sample.values);
  std::sort(singles.begin(), singles.end());
  const std::vector<double> sums = pair_sums(folded(sample.values), seed);
  if (singles.size() < 2) throw DomainError("sample too short for pairing");
  const double q90 = singles[static_cast<std::size_t>(0.9 * static_cast<double>(singles.size() - 1))];
  std::vector<RatioPoint> out;
  for (double x : xs) {
    if (!(x > q90)) throw DomainError("x=" + std::to_string(x) + " is not above the sample 0.9 quantile");
    out.push_back(ratio_from_sorted(singles, sums, x));
  }
  return out;
}

double deepest_feasible_x(const SampleSeries& sample, std::uint64_t seed) {
  std::vector<double> singles = folded(sample.values);
  std::sort(singles.begin(), singles.end());
  const std::vector<double> sums = pair_sums(folded(sample.values), seed);
  const std::size_t n = singles.size();
  if (n <= kMinTailExceedances) throw InsufficientTailData(0.0, static_cast<long long>(n), kMinTailExceedances);
  const double q90 = singles[static_cast<std::size_t>(0.9 * static_cast<double>(n - 1))];
  // Walk down from the value with exactly kMinTailExceedances above it.
  for (std::size_t idx = n - kMinTailExceedances - 1;; --idx) {
    const double x = singles[idx];
    if (!(x > q90)) break;
    if (count_above(singles, x) >= kMinTailExceedances && count_above(sums, x) >= kMinTailExceedances) return x;
    if (idx == 0) break;
  }
  throw InsufficientTailData(q90, 0, kMinTailExceedances);
}

std::vector<SumMaxPoint> sum_max_ratio(const DistributionSpec& spec, int n, std::span<const double> xs,
                                       std::uint64_t replicates, std::uint64_t seed, unsigned threads) {
  spec.validate();
  if (n < 1) throw DomainError("n must be at least 1");
  if (replicates < 1) throw DomainError("replicates must be at least 1");
  const Stream root = Stream(seed).child("sum_max_ratio");
  struct Counts {
    std::vector<std::uint64_t> sum_hits;
    std::vector<std::uint64_t> sum_only_hits;  // S_n > x >= M_n
  };
  const auto parts = reduce_blocks<Counts>(replicates, threads, [&](std::uint64_t b, std::uint64_t e) {
    Counts c{std::vector<std::uint64_t>(xs.size(), 0), std::vector<std::uint64_t>(xs.size(), 0)};
    for (std::uint64_t r = b; r < e; ++r) {
      Stream st = root.child(r);
      double s = 0.0;
      double m = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        const double v = draw(spec, st);
        s += v;
        m = std::max(m, v);
      }
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (s > xs[i]) {
          ++c.sum_hits[i];
          if (!(m > xs[i])) ++c.sum_only_hits[i];
        }
      }
    }
    return c;
  });
  const auto reps = static_cast<double>(replicates);
  std::vector<SumMaxPoint> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::uint64_t hits = 0;
    std::uint64_t only = 0;
    for (const auto& c : parts) {
      hits += c.sum_hits[i];
      only += c.sum_only_hits[i];
    }
    if (hits < kMinTailExceedances) {
      throw InsufficientTailData(xs[i], static_cast<long long>(hits), kMinTailExceedances);
    }
    const double sf = survival(spec, xs[i]);
    const double max_sf = -std::expm1(static_cast<double>(n) * log_cdf(spec, xs[i]));
    const double p = static_cast<double>(hits) / reps;
    const double q = static_cast<double>(only) / reps;
    out.push_back({.n = n,
                   .x = xs[i],
                   .ratio_a = p / sf,
                   .stderr_a = std::sqrt(p * (1.0 - p) / reps) / sf,
                   .ratio_b = 1.0 + q / max_sf,
                   .stderr_b = std::sqrt(q * (1.0 - q) / reps) / max_sf,
                   .exceedances = hits});
  }
  return out;
}

double sum_quantile_mc(const DistributionSpec& spec, int n, double q, std::uint64_t replicates, std::uint64_t seed,
                       unsigned threads) {
  spec.validate();
  if (n < 1) throw DomainError("n must be at least 1");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0,1)");
  if (replicates < 1) throw DomainError("replicates must be at least 1");
  std::vector<double> sums(replicates);
  const Stream root = Stream(seed).child("sum_quantile");
  parallel_blocks(replicates, threads, [&](std::uint64_t b, std::uint64_t e, unsigned) {
    for (std::uint64_t r = b; r < e; ++r) {
      Stream st = root.child(r);
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += draw(spec, st);
      sums[r] = s;
    }
  });
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(replicates)));
  rank = std::clamp<std::size_t>(rank, 1, sums.size()) - 1;
  std::nth_element(sums.begin(), sums.begin() + static_cast<std::ptrdiff_t>(rank), sums.end());
  return sums[rank];
}

std::vector<MaxToSumPoint> max_to_sum(std::span<const double> sample, double p) {
  if (sample.empty()) throw DomainError("max_to_sum needs a non-empty sample");
  if (!(p > 0.0)) throw DomainError("moment order must be positive");
  std::vector<MaxToSumPoint> path;
  double max_abs = 0.0;
  double rel_sum = 0.0;  // sum |x_i|^p / max |x_i|^p
  std::size_t next = 1;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double a = std::fabs(sample[i]);
    if (a > max_abs) {
      rel_sum = (max_abs > 0.0 ? rel_sum * std::pow(max_abs / a, p) : 0.0) + 1.0;
      max_abs = a;
    } else if (a > 0.0) {
      rel_sum += std::pow(a / max_abs, p);
    }
    const std::size_t n = i + 1;
    if (n == next || n == sample.size()) {
      if (max_abs > 0.0) path.push_back({n, 1.0 / rel_sum});
      if (n == next) next *= 2;
    }
  }
  if (max_abs == 0.0) throw DegenerateInput("max_to_sum: sample is identically zero");
  return path;
}

std::size_t default_hill_k(std::size_t n) {
  return static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 0.6)));
}

HillEstimate hill_estimator(std::span<const double> sample, std::optional<std::size_t> k) {
  std::vector<double> positive;
  positive.reserve(sample.size());
  for (double v : sample) {
    if (v != 0.0) positive.push_back(std::fabs(v));
  }
  if (positive.size() < 11) throw DomainError("hill estimator needs at least 11 nonzero values");
  const std::size_t kk = k.value_or(std::min(default_hill_k(positive.size()), positive.size() - 1));
  if (kk < 10) throw DomainError("hill estimator needs k >= 10");
  if (positive.size() < kk + 1) {
    throw DomainError("hill estimator needs at least k+1 = " + std::to_string(kk + 1) + " positive values");
  }
  auto top_end = positive.begin() + static_cast<std::ptrdiff_t>(kk + 1);
  std::nth_element(positive.begin(), positive.begin() + static_cast<std::ptrdiff_t>(kk), positive.end(),
                   std::greater<>());
  std::sort(positive.begin(), top_end, std::greater<>());
  const double threshold = positive[kk];
  double log_sum = 0.0;
  for (std::size_t i = 0; i < kk; ++i) log_sum += std::log(positive[i] / threshold);
  if (!(log_sum > 0.0)) throw DegenerateInput("hill estimator: top order statistics are tied");
  const double alpha = static_cast<double>(kk) / log_sum;
  return {.alpha = alpha, .stderr_ = alpha / std::sqrt(static_cast<double>(kk)), .k = kk};
}

std::vector<double> default_exp_epsilons() { return {0.1, 0.5, 1.0}; }

std::vector<ExpMomentPoint> exp_moment_probe(std::span<const double> sample, std::span<const double> epsilons) {
  if (sample.size() < 2) throw DomainError("exp_moment_probe needs at least two values");
  const std::size_t half = sample.size() / 2;
  std::vector<ExpMomentPoint> out;
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
    double sum = 0.0;
    double half_mean = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      sum += std::exp(eps * std::fabs(sample[i]));
      if (i + 1 == half) half_mean = sum / static_cast<double>(half);
    }
    const double mean = sum / static_cast<double>(sample.size());
    Growth verdict = Growth::stable;
    if (!std::isfinite(mean) || !std::isfinite(half_mean)) {
      verdict = Growth::divergent;
    } else if (std::fabs(mean - half_mean) > 0.1 * half_mean) {
      verdict = Growth::divergent;
    }
    out.push_back({.epsilon = eps, .verdict = verdict, .mean = std::isfinite(mean) ? mean : HUGE_VAL});
  }
  return out;
}

ClassificationInputs classification_inputs(const TailDiagnosticsReport& report) {
  ClassificationInputs in;
  if (report.hill) in.hill_alpha = report.hill->alpha;
  if (!report.max_to_sum_path.empty() && report.moment_order == 1.0) {
    in.max_to_sum_r1 = report.max_to_sum_path.back().r;
  } else if (!report.max_to_sum_path.empty()) {
    // Present but at another order: satisfies the precondition without the cross-check.
    in.max_to_sum_r1 = std::numeric_limits<double>::quiet_NaN();
  }
  if (!report.convolution_ratios.empty()) in.convolution_ratio = report.convolution_ratios.back().ratio;
  for (const auto& p : report.exp_moment_probe) in.exp_verdicts.push_back(p.verdict);
  return in;
}

TailClass classify_tail(const ClassificationInputs& in) {
  if (!in.hill_alpha || !in.max_to_sum_r1) {
    throw DomainError("classify_tail needs at least the Hill and max-to-sum diagnostics");
  }
  const bool band = in.convolution_ratio && *in.convolution_ratio >= kSubexpBandLow &&
                    *in.convolution_ratio <= kSubexpBandHigh;
  const bool no_exp_moments =
      !in.exp_verdicts.empty() &&
      std::all_of(in.exp_verdicts.begin(), in.exp_verdicts.end(), [](Growth g) { return g == Growth::divergent; });
  const TailClass light = (band || no_exp_moments) ? TailClass::subexponential : TailClass::thin;

  const double alpha = *in.hill_alpha;
  const double r1 = *in.max_to_sum_r1;
  if (alpha <= 1.0) {
    // A vanishing max-to-sum ratio contradicts an infinite mean.
    if (r1 < 0.01) throw AmbiguousClassification(std::string(to_string(TailClass::infinite_mean)),
                                                 std::string(to_string(light)));
    return TailClass::infinite_mean;
  }
  if (alpha <= 2.0) return TailClass::infinite_variance;
  if (r1 > 0.2) {
    throw AmbiguousClassification(std::string(to_string(light)), std::string(to_string(TailClass::infinite_mean)));
  }
  return light;
}

std::string_view to_string(Quadrant q) noexcept {
  switch (q) {
    case Quadrant::I:
      return "I";
    case Quadrant::II:
      return "II";
    case Quadrant::III:
      return "III";
    case Quadrant::IV:
      return "IV";
  }
  return "?";
}

std::string_view to_string(Scope s) noexcept { return s == Scope::local ? "local" : "systemic"; }

Scope scope_from_string(std::string_view name) {
  if (name == "local") return Scope::local;
  if (name == "systemic") return Scope::systemic;
  throw DomainError("unknown exposure scope '" + std::string(name) + "'");
}

QuadrantVerdict classify_quadrant(TailClass tail_class, Scope scope) noexcept {
  Quadrant q = Quadrant::I;
  if (!is_fat(tail_class)) {
    q = scope == Scope::local ? Quadrant::I : Quadrant::II;
  } else {
    q = scope == Scope::local ? Quadrant::III : Quadrant::IV;
  }
  return {.quadrant = q, .tail_class = tail_class, .scope = scope, .pp_applies = q == Quadrant::IV};
}

TailDiagnosticsReport analyze_sample(const SampleSeries& sample, const SampleAnalysisOptions& options) {
  TailDiagnosticsReport report;
  report.moment_order = options.moment_order;
  report.max_to_sum_path = max_to_sum(sample.values, options.moment_order);
  report.hill = hill_estimator(sample.values, options.hill_k);
  report.exp_moment_probe = exp_moment_probe(sample.values, options.epsilons);
  try {
    const double x = deepest_feasible_x(sample, options.seed);
    const double xs[] = {x};
    report.convolution_ratios = convolution_ratio(sample, xs, options.seed);
  } catch (const InsufficientTailData&) {
    // Too short for a pair-sum tail; classification falls back to the other probes.
  }
  report.tail_class = classify_tail(classification_inputs(report));
  return report;
}

}  // namespace ruinkit
