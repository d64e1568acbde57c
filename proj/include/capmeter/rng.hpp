#pragma once

// Deterministic counter-based pseudo-random generator.
//
// Every random quantity in the library is a pure function of a 64-bit stream
// key and a 64-bit counter: word_at(key, t) applies the SplitMix64 finalizer
// to key + (t + 1) * kGolden. Stream keys for datasets, labelings and
// training restarts are derived by hashing the index tuple with derive(), so
// any trial can be regenerated in isolation and results never depend on
// evaluation order or thread count. Normal variates use Box-Muller on
// consecutive word pairs.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace capmeter::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

/// Word t of the stream identified by key.
constexpr std::uint64_t word_at(std::uint64_t key, std::uint64_t t) noexcept {
  return mix64(key + (t + 1) * kGolden);
}

/// Hashes an index tuple into a stream key:
///   h = mix64(seed + kGolden); then per part p: h = mix64(h ^ (p + kGolden)).
template <class... Parts>
constexpr std::uint64_t derive(std::uint64_t seed, Parts... parts) noexcept {
  std::uint64_t h = mix64(seed + kGolden);
  ((h = mix64(h ^ (static_cast<std::uint64_t>(parts) + kGolden))), ...);
  return h;
}

// Fixed tags that keep unrelated streams derived from one base seed apart.
inline constexpr std::uint64_t kTagDataset = 0xD5;
inline constexpr std::uint64_t kTagLabeling = 0x1B;

/// Double in [0, 1) from the top 53 bits of a word.
constexpr double unit_from_word(std::uint64_t w) noexcept {
  return static_cast<double>(w >> 11) * 0x1.0p-53;
}

/// Double in (0, 1]; never zero, safe under log().
constexpr double open_unit_from_word(std::uint64_t w) noexcept {
  return static_cast<double>((w >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal variate t of stream key. Variates 2m and 2m+1 come from
/// one Box-Muller transform of words 2m and 2m+1; pure in (key, t).
inline double normal_at(std::uint64_t key, std::uint64_t t) noexcept {
  const std::uint64_t m = t / 2;
  const double u1 = open_unit_from_word(word_at(key, 2 * m));
  const double u2 = unit_from_word(word_at(key, 2 * m + 1));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return (t % 2 == 0) ? r * std::cos(a) : r * std::sin(a);
}

/// Sequential word/uniform view over one stream.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next_u64() noexcept { return word_at(key_, t_++); }
  constexpr double next_unit() noexcept { return unit_from_word(next_u64()); }
  constexpr double next_uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_unit();
  }

 private:
  std::uint64_t key_;
  std::uint64_t t_ = 0;
};

}  // namespace capmeter::rng
