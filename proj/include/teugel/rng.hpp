#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace teugel::rng {

// SplitMix64 output function (Steele, Lea, Flood). Counter-based: the k-th
// draw of a stream is a pure function of (key, k), so any draw can be
// addressed randomly without generating its predecessors.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive a child key from a parent key and a tag/index pair.
inline std::uint64_t derive(std::uint64_t key, std::uint64_t tag, std::uint64_t index = 0) {
  std::uint64_t h = mix64(key ^ (0x2545f4914f6cdd1dULL * tag));
  return mix64(h ^ (0x9e3779b97f4a7c15ULL * index) ^ index);
}

inline std::uint64_t tag(std::string_view name) {
  // FNV-1a over the tag name; tags are short compile-time literals.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline double uniform_at(std::uint64_t key, std::uint64_t counter) {
  // 53 random bits into (0, 1); never exactly 0 so logs are safe.
  const std::uint64_t bits = mix64(key + counter * 0x9e3779b97f4a7c15ULL);
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline double normal_at(std::uint64_t key, std::uint64_t counter) {
  // Box-Muller, cosine branch; one normal per counter, two uniforms each.
  const double u1 = uniform_at(key, 2 * counter);
  const double u2 = uniform_at(key, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Sequential view over a counter-based stream.
class Stream {
public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  double uniform() { return uniform_at(key_, counter_++); }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Poisson by inversion (Knuth); fine for the desk-scale means used here.
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    double prod = 1.0;
    int k = -1;
    do {
      ++k;
      prod *= uniform();
    } while (prod > limit);
    return k;
  }

  std::uint64_t key() const { return key_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace teugel::rng
