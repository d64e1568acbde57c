#pragma once

// Exact counting of distinct threshold functions. T(n,k) is the number of
// binary labelings of n points in general position in k dimensions that a
// single threshold unit with k free weights can realize:
//
//   T(n,k) = T(n-1,k) + T(n-1,k-1),  T(n,1) = T(1,k) = 2
//          = 2 * sum_{l<k} C(n-1,l)
//          = 2^n whenever k >= n.
//
// Values grow past 64 bits near n = 70, so everything is computed in
// BigCount. Curve fractions T(n,k)/2^n are dyadic rationals and are rounded
// to double exactly once.

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "capmeter/bigcount.hpp"

namespace capmeter {

/// One point of the ideal characteristic curve: fraction of the 2^n labelings
/// realizable with k weights, abscissa normalized to x = n/k.
struct CurvePoint {
  int n = 0;
  int k = 0;
  double x = 0.0;
  double fraction = 0.0;
};

namespace detail {

// Supported range. The recurrence/closed form are exact for any n, k >= 1;
// the cap only bounds memory for runaway CLI inputs (well above the 10,000
// the tool documents).
inline constexpr int kTnkMaxArg = 1 << 20;

inline void check_tnk_domain(int n, int k) {
  if (n < 1 || k < 1)
    throw std::domain_error("T(n,k) is defined for n >= 1 and k >= 1 only");
  if (n > kTnkMaxArg || k > kTnkMaxArg)
    throw std::domain_error("T(n,k) argument exceeds the supported range");
}

}  // namespace detail

/// Iterative evaluation of the closed form 2 * sum_{l<k} C(n-1,l).
inline BigCount tnk_closed(int n, int k) {
  detail::check_tnk_domain(n, k);
  if (k >= n) return BigCount::pow2(static_cast<unsigned>(n));
  BigCount term(1);  // C(n-1, 0)
  BigCount sum(1);
  for (int l = 0; l < k - 1; ++l) {
    term.mul_small(static_cast<std::uint64_t>(n - 1 - l));
    term.divexact_small(static_cast<std::uint64_t>(l + 1));
    sum += term;
  }
  sum.mul_small(2);
  return sum;
}

/// Memoized Pascal-style evaluation of the recurrence. The table holds every
/// cell of the filled rectangle {2..n} x {2..k}; requests whose rectangle
/// would exceed the entry cap are answered by the closed form instead, so
/// memory stays bounded during large curve sweeps.
class TnkCache {
 public:
  static constexpr std::size_t kDefaultMaxEntries = std::size_t{1} << 16;

  explicit TnkCache(std::size_t max_entries = kDefaultMaxEntries) : cap_(max_entries) {}

  BigCount recursive(int n, int k) {
    detail::check_tnk_domain(n, k);
    if (n == 1 || k == 1) return BigCount(2);
    std::lock_guard lock(mu_);
    const std::size_t need =
        static_cast<std::size_t>(std::max(n, rows_)) * static_cast<std::size_t>(std::max(k, cols_));
    if (need > cap_) return tnk_closed(n, k);
    extend(std::max(n, rows_), std::max(k, cols_));
    return table_.at(key(n, k));
  }

 private:
  static std::uint64_t key(int n, int k) noexcept {
    return (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint32_t>(k);
  }

  // Cell lookup with the recurrence base rows folded in.
  const BigCount& cell(int n, int k) const {
    static const BigCount kTwo(2);
    if (n == 1 || k == 1) return kTwo;
    return table_.at(key(n, k));
  }

  // Grows the filled rectangle to rows x cols, adding only missing cells.
  void extend(int rows, int cols) {
    for (int r = 2; r <= rows; ++r)
      for (int c = 2; c <= cols; ++c) {
        if (r <= rows_ && c <= cols_) continue;
        table_.emplace(key(r, c), cell(r - 1, c) + cell(r - 1, c - 1));
      }
    rows_ = rows;
    cols_ = cols;
  }

  mutable std::mutex mu_;
  std::unordered_map<std::uint64_t, BigCount> table_;
  int rows_ = 1;
  int cols_ = 1;
  std::size_t cap_;
};

/// Recurrence evaluation through a process-wide synchronized cache.
inline BigCount tnk_recursive(int n, int k) {
  static TnkCache cache;
  return cache.recursive(n, k);
}

/// Characteristic curve of an ideal k-weight unit: fraction T(n,k)/2^n for
/// n = 1..n_max, each an exact dyadic rational rounded once to double. The
/// sequence is non-increasing and equals 1 exactly while n <= k.
inline std::vector<CurvePoint> theoretical_curve(int k, int n_max) {
  detail::check_tnk_domain(n_max, k);
  std::vector<CurvePoint> out;
  out.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const BigCount t = tnk_closed(n, k);
    out.push_back({n, k, static_cast<double>(n) / k, t.ldexp_double(-n)});
  }
  return out;
}

struct IdealPoints {
  int vc = 0;  // n = k: last n with complete shattering
  int mk = 0;  // n = 2k: exactly half of all labelings realizable
};

/// The two critical points of the ideal unit. Verifies T(2k,k) = 2^(2k-1)
/// for the returned point (skipped above k = 4096 where the check itself
/// would dominate the call).
inline IdealPoints ideal_points(int k) {
  detail::check_tnk_domain(1, k);
  IdealPoints p{k, 2 * k};
  if (k <= 4096) {
    BigCount half = tnk_closed(2 * k, k);
    half.mul_small(2);
    if (half != BigCount::pow2(static_cast<unsigned>(2 * k)))
      throw std::logic_error("ideal_points: T(2k,k) half-point identity failed");
  }
  return p;
}

}  // namespace capmeter
