#pragma once

#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <string_view>

namespace roomforge {

// 64-bit FNV-1a. Stable across platforms and runs, unlike std::hash.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Derives a child seed from a parent seed and a list of integer labels.
template <typename... Labels>
std::uint64_t derive_seed(std::uint64_t seed, Labels... labels) {
  std::string key = std::to_string(seed);
  ((key += ':', key += std::to_string(labels)), ...);
  return fnv1a64(key);
}

// mt19937_64 is fully specified by the standard; the std distributions
// are not, so bounded draws use rejection sampling here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  int range(int lo, int hi_inclusive) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi_inclusive - lo + 1)));
  }

  bool chance(int numerator, int denominator) {
    return below(static_cast<std::uint64_t>(denominator)) < static_cast<std::uint64_t>(numerator);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace roomforge
