#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gtsi {

// mt19937_64 with hand-rolled variate transforms. <random> distributions are
// implementation-defined, so using them would tie output bytes to a libstdc++
// version; these transforms keep identical seeds reproducible anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), eng_(splitmix(seed)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t raw() { return eng_(); }

  // uniform on [0,1) with 53 random bits
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // uniform integer in [lo, hi] inclusive; multiply-shift keeps bias < 2^-64
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const auto wide = static_cast<unsigned __int128>(eng_()) * span;
    return lo + static_cast<std::int64_t>(wide >> 64);
  }

  // Deterministic substream: hash (seed, stream index) so stages and
  // experiment cells draw from independent engines regardless of call order.
  Rng child(std::uint64_t stream) const {
    return Rng(splitmix(seed_ + 0x9e3779b97f4a7c15ULL * (stream + 1)));
  }
  Rng child(std::string_view tag) const { return child(fnv1a(tag)); }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

}  // namespace gtsi
