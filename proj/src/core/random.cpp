#include "gapcha/random.hpp"

#include <array>
#include <cstdio>
#include <limits>

namespace gapcha {

std::int64_t Stream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return lo + static_cast<std::int64_t>(draw % range);
}

double Stream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Stream derive_stream(Seed seed, std::string_view label) {
  return Stream(splitmix64(seed.value ^ splitmix64(fnv1a64(label))));
}

Seed derive_seed(Seed seed, std::string_view label) {
  return Seed{derive_stream(seed, label).next_u64()};
}

namespace {

std::string hex128(std::uint64_t hi, std::uint64_t lo) {
  std::array<char, 33> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return std::string(buf.data(), 32);
}

std::uint64_t entropy64() {
  thread_local std::random_device device;
  return (static_cast<std::uint64_t>(device()) << 32) ^ static_cast<std::uint64_t>(device());
}

}  // namespace

std::string random_nonce_hex() { return hex128(entropy64(), entropy64()); }

Seed random_seed() { return Seed{entropy64()}; }

std::string derived_nonce_hex(Seed seed, std::string_view label) {
  auto stream = derive_stream(seed, label);
  const auto hi = stream.next_u64();
  const auto lo = stream.next_u64();
  return hex128(hi, lo);
}

}  // namespace gapcha
