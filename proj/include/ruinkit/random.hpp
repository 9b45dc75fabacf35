#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string_view>
#include <vector>

namespace ruinkit {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a, used to turn stream labels into 64-bit words at compile time.
constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t label) noexcept {
  return mix64(mix64(parent ^ 0x6a09e667f3bcc909ULL) + mix64(label + 0x9e3779b97f4a7c15ULL));
}

// Counter-based generator: the i-th output of a stream is mix64(key + (i+1)*gamma).
// Streams are cheap values; child streams are derived by hashing (key, label), so
// any replicate can be regenerated without touching the others.
class Stream {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  constexpr explicit Stream(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

  [[nodiscard]] constexpr Stream child(std::uint64_t label) const noexcept {
    return Stream(derive_key(key_, label), tag_key{});
  }
  [[nodiscard]] constexpr Stream child(std::string_view label) const noexcept { return child(hash_label(label)); }

  [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] constexpr std::uint64_t position() const noexcept { return counter_; }

  constexpr std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }
  constexpr result_type operator()() noexcept { return next_u64(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  // Uniform on the open interval (0,1): 53 random bits centred in their cell.
  constexpr double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Random access: uniform_at(i) equals the (i+1)-th uniform() of a fresh copy.
  [[nodiscard]] constexpr double uniform_at(std::uint64_t index) const noexcept {
    return (static_cast<double>(mix64(key_ + (index + 1) * kGamma) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept {
    // Lemire's multiply-shift with rejection.
    __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<__uint128_t>(next_u64()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double standard_normal() noexcept;
  double standard_exponential() noexcept { return -std::log(uniform()); }
  // Marsaglia-Tsang; shape > 0.
  double gamma(double shape) noexcept;
  // Inversion for small means, PTRS (Hormann 1993) otherwise.
  std::uint64_t poisson(double mean) noexcept;

 private:
  struct tag_key {};
  constexpr Stream(std::uint64_t key, tag_key) noexcept : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Thread count used by replicate-parallel loops when a call passes 0.
// Results never depend on this value.
void set_default_threads(unsigned threads) noexcept;
[[nodiscard]] unsigned default_threads() noexcept;

// Splits [0, count) into contiguous blocks and runs body(begin, end, worker)
// on up to `threads` workers (0 = default_threads()). worker < returned value.
unsigned parallel_blocks(std::uint64_t count, unsigned threads,
                         const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& body);

// Runs fn(begin, end) -> Acc on each block and returns the per-block results in
// block order. Callers merge with exact (integer or order-fixed) reductions.
template <class Acc, class Fn>
std::vector<Acc> reduce_blocks(std::uint64_t count, unsigned threads, Fn&& fn) {
  const unsigned t = threads == 0 ? default_threads() : threads;
  std::vector<Acc> parts(t);
  const unsigned used =
      parallel_blocks(count, t, [&](std::uint64_t b, std::uint64_t e, unsigned w) { parts[w] = fn(b, e); });
  parts.resize(used);
  return parts;
}

}  // namespace ruinkit
