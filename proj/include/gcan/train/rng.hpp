#pragma once

// Seeded generators.  Each parameter buffer (and each dataset trajectory)
// gets its own stream: seed_for(base, name) = splitmix64(base ^ fnv1a(name)),
// fed to std::mt19937_64.  Results are reproducible within one build; the
// standard distributions are not portable across standard libraries.

#include <cstdint>
#include <random>
#include <string_view>

namespace gcan {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

inline std::uint64_t seed_for(std::uint64_t base, std::string_view stream) noexcept {
  return splitmix64(base ^ fnv1a(stream));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  Rng(std::uint64_t base, std::string_view stream) : gen_(seed_for(base, stream)) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double normal(double mean = 0.0, double stddev = 1.0) { return std::normal_distribution<double>(mean, stddev)(gen_); }
  std::uint64_t next() { return gen_(); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_); }
  std::mt19937_64& engine() noexcept { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace gcan
