#include "ruinkit/random.hpp"

#include "ruinkit/special.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace ruinkit {

double Stream::standard_normal() noexcept { return special::normal_quantile(uniform()); }

double Stream::gamma(double shape) noexcept {
  if (shape < 1.0) {
    // Boost to shape+1 and rescale by U^(1/shape).
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::uint64_t Stream::poisson(double mean) noexcept {
  if (mean <= 0.0) return 0;
  if (mean < 10.0) {
    const double target = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform();
    while (prod > target) {
      ++k;
      prod *= uniform();
    }
    return k;
  }
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

namespace {
std::atomic<unsigned> g_default_threads{0};
}

void set_default_threads(unsigned threads) noexcept { g_default_threads.store(threads); }

unsigned default_threads() noexcept {
  const unsigned t = g_default_threads.load();
  if (t != 0) return t;
  return std::max(1U, std::thread::hardware_concurrency());
}

unsigned parallel_blocks(std::uint64_t count, unsigned threads,
                         const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& body) {
  if (threads == 0) threads = default_threads();
  const auto workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, count)));
  if (workers == 1) {
    body(0, count, 0);
    return 1;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = count * w / workers;
    const std::uint64_t end = count * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return workers;
}

}  // namespace ruinkit
