#include "ruinkit/inference_pitfalls.hpp"

#include "ruinkit/errors.hpp"
#include "ruinkit/special.hpp"

#include <cmath>
#include <vector>

namespace ruinkit {

namespace {

MomentBlock moments(std::span<const double> v) {
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  MomentBlock m{.mean = mean, .variance = ss / (n - 1.0), .cv = std::nullopt};
  if (m.variance > 0.0) m.cv = mean / std::sqrt(m.variance);
  return m;
}

bool differs(double a, double b) { return std::fabs(a - b) > 0.1 * std::max(std::fabs(a), 1e-12); }

}  // namespace

ComparisonReport difference_stats(std::span<const double> x, std::span<const double> y, PairingMode mode,
                                  std::uint64_t seed) {
  if (x.size() < 2 || y.size() < 2) throw DomainError("difference_stats needs at least two values per sample");
  std::vector<double> diff;
  if (mode == PairingMode::paired) {
    if (x.size() != y.size()) throw DomainError("paired mode needs samples of equal length");
    diff.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - y[i];
  } else {
    const std::size_t m = std::max(x.size(), y.size());
    Stream sx = Stream(seed).child("pair_x");
    Stream sy = Stream(seed).child("pair_y");
    diff.resize(m);
    for (std::size_t i = 0; i < m; ++i) diff[i] = x[sx.below(x.size())] - y[sy.below(y.size())];
  }
  const MomentBlock mx = moments(x);
  const MomentBlock my = moments(y);
  ComparisonReport rep;
  rep.correct = moments(diff);
  rep.pairs = diff.size();
  rep.naive.mean = mx.mean - my.mean;
  rep.naive.variance = mx.variance - my.variance;
  if (mx.cv && my.cv) rep.naive.cv = *mx.cv - *my.cv;
  rep.cv_undefined = !rep.correct.cv.has_value();
  rep.naive_variance_negative = rep.naive.variance < 0.0;
  rep.variance_mismatch = differs(rep.correct.variance, rep.naive.variance);
  rep.cv_mismatch = rep.correct.cv && rep.naive.cv && differs(*rep.correct.cv, *rep.naive.cv);
  return rep;
}

double effect_for_power(double power, int n_per_group, double alpha) {
  if (!(power > 0.0 && power < 1.0)) throw DomainError("power must lie in (0,1)");
  if (n_per_group < 2) throw DomainError("n_per_group must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  const double z_crit = special::normal_quantile(1.0 - alpha / 2.0);
  return (z_crit + special::normal_quantile(power)) * std::sqrt(2.0 / n_per_group);
}

TwoTestReport two_test_fallacy_sim(double effect_x, double effect_y, int n_per_group, double alpha,
                                   std::uint64_t replicates, std::uint64_t seed, unsigned threads) {
  if (n_per_group < 2) throw DomainError("n_per_group must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  if (replicates < 1) throw DomainError("replicates must be at least 1");
  const double z_crit = special::normal_quantile(1.0 - alpha / 2.0);
  const double n = n_per_group;
  const double se_effect = std::sqrt(2.0 / n);
  const double se_interaction = std::sqrt(4.0 / n);
  const Stream root = Stream(seed).child("two_test");

  struct Counts {
    std::uint64_t incorrect = 0, correct = 0, sig_x = 0, sig_y = 0;
  };
  const auto parts = reduce_blocks<Counts>(replicates, threads, [&](std::uint64_t b, std::uint64_t e) {
    Counts c;
    for (std::uint64_t r = b; r < e; ++r) {
      Stream st = root.child(r);
      auto group_mean = [&](double mu) {
        double s = 0.0;
        for (int i = 0; i < n_per_group; ++i) s += mu + st.standard_normal();
        return s / n;
      };
      const double dx = group_mean(effect_x) - group_mean(0.0);
      const double dy = group_mean(effect_y) - group_mean(0.0);
      const bool sx = std::fabs(dx / se_effect) > z_crit;
      const bool sy = std::fabs(dy / se_effect) > z_crit;
      c.sig_x += sx;
      c.sig_y += sy;
      c.incorrect += sx != sy;
      c.correct += std::fabs((dx - dy) / se_interaction) > z_crit;
    }
    return c;
  });
  Counts total;
  for (const auto& c : parts) {
    total.incorrect += c.incorrect;
    total.correct += c.correct;
    total.sig_x += c.sig_x;
    total.sig_y += c.sig_y;
  }
  const auto reps = static_cast<double>(replicates);
  return {.effect_x = effect_x,
          .effect_y = effect_y,
          .n_per_group = n_per_group,
          .alpha = alpha,
          .replicates = replicates,
          .seed = seed,
          .incorrect_rate = static_cast<double>(total.incorrect) / reps,
          .correct_rate = static_cast<double>(total.correct) / reps,
          .power_x = static_cast<double>(total.sig_x) / reps,
          .power_y = static_cast<double>(total.sig_y) / reps};
}

LuckReport luck_quadrant_sim(double p_luck, std::uint64_t replicates, std::uint64_t seed, double luck_size) {
  if (!(p_luck >= 0.0 && p_luck <= 1.0)) throw DomainError("p_luck must lie in [0,1]");
  if (replicates < 1) throw DomainError("replicates must be at least 1");
  LuckReport rep{.p_luck = p_luck, .replicates = replicates, .seed = seed, .quadrants = {}};
  constexpr std::array<const char*, 4> names = {"lucky-lucky", "unlucky-unlucky", "lucky-unlucky", "unlucky-lucky"};
  std::array<double, 4> gap_sum{};
  const Stream root = Stream(seed).child("luck");
  for (std::uint64_t r = 0; r < replicates; ++r) {
    Stream st = root.child(r);
    const bool a = st.uniform() < p_luck;
    const bool b = st.uniform() < p_luck;
    const double oa = (a ? luck_size : -luck_size) + st.standard_normal();
    const double ob = (b ? luck_size : -luck_size) + st.standard_normal();
    const int q = a == b ? (a ? 0 : 1) : (a ? 2 : 3);
    ++rep.quadrants[q].count;
    gap_sum[q] += std::fabs(oa - ob);
  }
  for (std::size_t q = 0; q < 4; ++q) {
    auto& quad = rep.quadrants[q];
    quad.name = names[q];
    quad.frequency = static_cast<double>(quad.count) / static_cast<double>(replicates);
    quad.mean_gap = quad.count ? gap_sum[q] / static_cast<double>(quad.count) : 0.0;
  }
  return rep;
}

}  // namespace ruinkit
