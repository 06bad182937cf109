#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gapcha/types.hpp"

namespace gapcha {

/// Deterministic single-consumer random stream.
///
/// Output depends only on the 64-bit state it was constructed with; the
/// helpers below avoid the standard distributions so that sequences are
/// identical across standard library implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t state) : engine_(state) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer on the closed range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform real on [0, 1) with 53 bits of resolution.
  double uniform01();
  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i - 1)));
      std::swap(items[i - 1], items[j]);
    }
  }

  template <typename T>
  const T& pick(std::span<const T> items) {
    return items[static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(items.size()) - 1))];
  }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return pick(std::span<const T>(items));
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes);

/// Independent sub-stream for (seed, label). Identical inputs give identical
/// sequences in any process.
Stream derive_stream(Seed seed, std::string_view label);

/// Derives a child seed for (seed, label); used for per-instance benchmark seeds.
Seed derive_seed(Seed seed, std::string_view label);

/// 128 bits from the OS entropy source, as 32 lowercase hex characters.
std::string random_nonce_hex();
/// 64 bits from the OS entropy source.
Seed random_seed();

/// 128-bit deterministic identifier for (seed, label), as 32 lowercase hex characters.
std::string derived_nonce_hex(Seed seed, std::string_view label);

}  // namespace gapcha
