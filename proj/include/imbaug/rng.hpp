#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace imbaug {

// Seeded generator with distribution code written out explicitly, so a
// given seed yields the same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via Box-Muller, one cached value.
  double normal();

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = uniform_index(i);
      std::swap(first[static_cast<std::ptrdiff_t>(i - 1)], first[static_cast<std::ptrdiff_t>(j)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Independent substream seed for a named stage, e.g. derive_seed(master, "skn", class_id).
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::uint64_t index = 0);

}  // namespace imbaug
