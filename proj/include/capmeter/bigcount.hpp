#pragma once

// BigCount: arbitrary-precision nonnegative integer, little-endian 64-bit
// limbs. Carries exactly the operations the counting code needs (addition,
// scalar multiply, exact scalar divide, powers of two, comparison, decimal
// and correctly rounded double conversion); nothing else.

#include <cassert>
#include <compare>
#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace capmeter {

class BigCount {
 public:
  BigCount() = default;
  BigCount(std::uint64_t v) {  // NOLINT: implicit by design
    if (v != 0) limbs_.push_back(v);
  }

  static BigCount pow2(unsigned e) {
    BigCount r;
    r.limbs_.assign(e / 64 + 1, 0);
    r.limbs_.back() = std::uint64_t{1} << (e % 64);
    return r;
  }

  bool is_zero() const noexcept { return limbs_.empty(); }

  BigCount& operator+=(const BigCount& o) {
    if (limbs_.size() < o.limbs_.size()) limbs_.resize(o.limbs_.size(), 0);
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
      carry += limbs_[i];
      if (i < o.limbs_.size()) carry += o.limbs_[i];
      limbs_[i] = static_cast<std::uint64_t>(carry);
      carry >>= 64;
    }
    if (carry != 0) limbs_.push_back(static_cast<std::uint64_t>(carry));
    return *this;
  }
  friend BigCount operator+(BigCount a, const BigCount& b) { return a += b; }

  /// In-place multiply by a machine word.
  void mul_small(std::uint64_t f) {
    if (f == 0) {
      limbs_.clear();
      return;
    }
    unsigned __int128 carry = 0;
    for (auto& limb : limbs_) {
      carry += static_cast<unsigned __int128>(limb) * f;
      limb = static_cast<std::uint64_t>(carry);
      carry >>= 64;
    }
    if (carry != 0) limbs_.push_back(static_cast<std::uint64_t>(carry));
  }

  /// In-place divide by a machine word; the division must be exact.
  void divexact_small(std::uint64_t d) {
    assert(d != 0);
    unsigned __int128 rem = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
      const unsigned __int128 cur = (rem << 64) | limbs_[i];
      limbs_[i] = static_cast<std::uint64_t>(cur / d);
      rem = cur % d;
    }
    assert(rem == 0 && "divexact_small: inexact division");
    trim();
  }

  friend bool operator==(const BigCount& a, const BigCount& b) noexcept {
    return a.limbs_ == b.limbs_;
  }
  friend std::strong_ordering operator<=>(const BigCount& a, const BigCount& b) noexcept {
    if (a.limbs_.size() != b.limbs_.size())
      return a.limbs_.size() <=> b.limbs_.size();
    for (std::size_t i = a.limbs_.size(); i-- > 0;)
      if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] <=> b.limbs_[i];
    return std::strong_ordering::equal;
  }

  /// Number of significant bits; 0 for the value 0.
  std::size_t bit_length() const noexcept {
    if (limbs_.empty()) return 0;
    return 64 * (limbs_.size() - 1) +
           (64 - static_cast<std::size_t>(__builtin_clzll(limbs_.back())));
  }

  bool bit(std::size_t i) const noexcept {
    const std::size_t w = i / 64;
    if (w >= limbs_.size()) return false;
    return (limbs_[w] >> (i % 64)) & 1;
  }

  /// Throws if the value does not fit in 64 bits.
  std::uint64_t to_u64() const {
    if (limbs_.size() > 1) throw std::overflow_error("BigCount::to_u64: value too large");
    return limbs_.empty() ? 0 : limbs_[0];
  }

  std::string to_decimal() const {
    if (limbs_.empty()) return "0";
    std::vector<std::uint64_t> work = limbs_;
    std::string out;
    constexpr std::uint64_t kChunk = 10'000'000'000'000'000'000ULL;  // 10^19
    while (!work.empty()) {
      unsigned __int128 rem = 0;
      for (std::size_t i = work.size(); i-- > 0;) {
        const unsigned __int128 cur = (rem << 64) | work[i];
        work[i] = static_cast<std::uint64_t>(cur / kChunk);
        rem = cur % kChunk;
      }
      while (!work.empty() && work.back() == 0) work.pop_back();
      std::string part = std::to_string(static_cast<std::uint64_t>(rem));
      if (!work.empty()) part.insert(0, 19 - part.size(), '0');
      out.insert(0, part);
    }
    return out;
  }

  /// Nearest double of value * 2^exp2, round-to-nearest-even with a single
  /// rounding. Exact dyadic path for fractions T(n,k) / 2^n.
  double ldexp_double(int exp2) const {
    const std::size_t bl = bit_length();
    if (bl == 0) return 0.0;
    if (bl <= 53) return std::ldexp(static_cast<double>(limbs_[0]), exp2);
    // Top 53 bits, then round on bit bl-54 with sticky below it.
    const std::size_t shift = bl - 53;
    std::uint64_t top = extract_bits(shift, 53);
    const bool round_bit = bit(shift - 1);
    bool sticky = false;
    for (std::size_t i = 0; i + 1 < shift && !sticky; ++i) sticky = bit(i);
    if (round_bit && (sticky || (top & 1))) ++top;  // 2^53 stays exact
    return std::ldexp(static_cast<double>(top), static_cast<int>(shift) + exp2);
  }

  double to_double() const { return ldexp_double(0); }

 private:
  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  }

  // Bits [lo, lo+count) as an integer; count <= 64.
  std::uint64_t extract_bits(std::size_t lo, unsigned count) const noexcept {
    std::uint64_t r = 0;
    for (unsigned j = 0; j < count; ++j)
      if (bit(lo + j)) r |= std::uint64_t{1} << j;
    return r;
  }

  std::vector<std::uint64_t> limbs_;  // little-endian, no trailing zero limbs
};

}  // namespace capmeter
