#pragma once

// Exact ground truth for linear separability. A labeling is (strictly)
// separable iff the margin system  y_i (w . x_i - b) >= 1  is feasible --
// any positive margin rescales to 1 -- so the decision reduces to an LP
// feasibility test with a bounded-norm box |w_j| <= 1e6 keeping the LP
// bounded. Queries whose Phase-I optimum lands in the numerical ambiguity
// band are re-solved with a perturbed margin and flagged as degenerate.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "capmeter/bigcount.hpp"
#include "capmeter/dataset.hpp"
#include "capmeter/simplex.hpp"
#include "capmeter/work_pool.hpp"

namespace capmeter {

struct SeparabilityQuery {
  const Dataset* points = nullptr;
  std::vector<std::uint8_t> labels;
  bool homogeneous = false;  // hyperplane through the origin vs affine with bias

  void validate() const {
    if (points == nullptr || points->n < 1 || points->k < 1)
      throw std::invalid_argument("SeparabilityQuery: empty point set");
    if (labels.size() != static_cast<std::size_t>(points->n))
      throw std::invalid_argument("SeparabilityQuery: labels length must equal n");
  }
};

struct SeparabilityVerdict {
  bool separable = false;
  bool degenerate = false;  // decided only after a perturbed-margin re-solve
};

namespace detail {

inline constexpr double kWeightBox = 1e6;
inline constexpr double kFeasEps = 1e-9;
inline constexpr double kAmbiguousHi = 1e-6;

// Feasibility of C v >= margin, |v_j| <= box, via v = p - q (p, q >= 0 with
// p_j, q_j <= box) and surplus variables. The box rows enter the tableau in
// the scaled form p_j/box + t_j = 1 so every right-hand side is O(1); the
// tiny coefficient is pivoted on only when the box actually binds.
inline PhaseOneResult margin_lp(const std::vector<std::vector<double>>& c_rows, double margin,
                                double box) {
  const std::size_t n = c_rows.size();
  const std::size_t d = c_rows[0].size();
  const std::size_t vars = 2 * d + n + 2 * d;  // p, q, s, t, v
  std::vector<std::vector<double>> a(n + 2 * d, std::vector<double>(vars, 0.0));
  std::vector<double> b(n + 2 * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      a[i][j] = c_rows[i][j];
      a[i][d + j] = -c_rows[i][j];
    }
    a[i][2 * d + i] = -1.0;  // surplus
    b[i] = margin;
  }
  for (std::size_t j = 0; j < d; ++j) {
    a[n + j][j] = 1.0 / box;
    a[n + j][2 * d + n + j] = 1.0;
    b[n + j] = 1.0;
    a[n + d + j][d + j] = 1.0 / box;
    a[n + d + j][2 * d + n + d + j] = 1.0;
    b[n + d + j] = 1.0;
  }
  return phase_one_feasible(a, b, kFeasEps);
}

// Signed, bias-augmented rows y'_i * (x_i, -1) (or y'_i * x_i when
// homogeneous) with y' in {-1, +1}.
inline std::vector<std::vector<double>> signed_rows(const Dataset& pts,
                                                    std::span<const std::uint8_t> labels,
                                                    bool homogeneous) {
  const std::size_t d = static_cast<std::size_t>(pts.k) + (homogeneous ? 0 : 1);
  std::vector<std::vector<double>> rows(pts.n, std::vector<double>(d));
  for (int i = 0; i < pts.n; ++i) {
    const double sign = labels[i] ? 1.0 : -1.0;
    for (int j = 0; j < pts.k; ++j) rows[i][j] = sign * pts.at(i, j);
    if (!homogeneous) rows[i][d - 1] = -sign;
  }
  return rows;
}

}  // namespace detail

inline SeparabilityVerdict is_separable_detailed(const SeparabilityQuery& q) {
  q.validate();
  const auto rows = detail::signed_rows(*q.points, q.labels, q.homogeneous);
  const PhaseOneResult first = detail::margin_lp(rows, 1.0, detail::kWeightBox);
  if (first.infeasibility < detail::kFeasEps) return {true, false};
  if (first.infeasibility >= detail::kAmbiguousHi) return {false, false};
  // Optimal slack inside [1e-9, 1e-6): numerically ambiguous. Re-solve with a
  // perturbed margin and decide against the band's upper edge; genuine
  // infeasibility scales with the margin, accumulated round-off does not.
  const PhaseOneResult redo = detail::margin_lp(rows, 0.5, detail::kWeightBox);
  return {redo.infeasibility < 0.5 * detail::kAmbiguousHi, true};
}

inline bool is_separable(const SeparabilityQuery& q) { return is_separable_detailed(q).separable; }

/// Number of the 2^n labelings of the given points that are linearly
/// separable. For points in random position this equals T(n, k) with
/// k = point dimension when homogeneous, dimension + 1 when affine.
/// Labelings are independent queries; with threads > 1 they are counted on
/// a pool (order-insensitive, so the result is thread-count invariant).
inline BigCount count_separable(const Dataset& points, bool homogeneous, unsigned threads = 1) {
  if (points.n > 22)
    throw std::invalid_argument("count_separable: n > 22 exceeds the enumeration budget");
  const std::uint64_t total = std::uint64_t{1} << points.n;
  std::atomic<std::uint64_t> count{0};
  const WorkPool pool(threads);
  pool.for_each(0, total, [&](std::uint64_t mask) {
    SeparabilityQuery q;
    q.points = &points;
    q.homogeneous = homogeneous;
    q.labels.resize(static_cast<std::size_t>(points.n));
    for (int i = 0; i < points.n; ++i) q.labels[i] = (mask >> i) & 1;
    if (is_separable(q)) count.fetch_add(1, std::memory_order_relaxed);
  });
  return BigCount(count.load());
}

namespace detail {

// Singular values (descending) of a small dense matrix by one-sided Jacobi
// on the narrower side.
inline std::vector<double> singular_values(std::vector<std::vector<double>> m) {
  if (m.empty()) return {};
  std::size_t rows = m.size(), cols = m[0].size();
  if (cols > rows) {  // transpose so cols <= rows
    std::vector<std::vector<double>> t(cols, std::vector<double>(rows));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) t[j][i] = m[i][j];
    m.swap(t);
    std::swap(rows, cols);
  }
  auto col_dot = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += m[i][a] * m[i][b];
    return s;
  };
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p)
      for (std::size_t r = p + 1; r < cols; ++r) {
        const double app = col_dot(p, p), arr = col_dot(r, r), apr = col_dot(p, r);
        if (std::abs(apr) <= 1e-15 * std::sqrt(app * arr) || apr == 0.0) continue;
        rotated = true;
        const double tau = (arr - app) / (2.0 * apr);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
        for (std::size_t i = 0; i < rows; ++i) {
          const double vp = m[i][p], vr = m[i][r];
          m[i][p] = c * vp - s * vr;
          m[i][r] = s * vp + c * vr;
        }
      }
    if (!rotated) break;
  }
  std::vector<double> sv(cols);
  for (std::size_t j = 0; j < cols; ++j) sv[j] = std::sqrt(col_dot(j, j));
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

inline std::size_t numeric_rank(const std::vector<std::vector<double>>& m, double rel_tol) {
  const auto sv = singular_values(m);
  if (sv.empty() || sv[0] == 0.0) return 0;
  std::size_t r = 0;
  for (double s : sv)
    if (s > rel_tol * sv[0]) ++r;
  return r;
}

template <class Visit>
inline bool for_each_subset(int n, int size, Visit&& visit) {
  std::vector<int> idx(size);
  for (int i = 0; i < size; ++i) idx[i] = i;
  while (true) {
    if (!visit(idx)) return false;
    int i = size - 1;
    while (i >= 0 && idx[i] == n - size + i) --i;
    if (i < 0) return true;
    ++idx[i];
    for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// True iff every subset of size <= d is linearly independent and no d+1
/// points lie on a common (d-1)-dimensional affine plane. Rank decisions use
/// singular values with tolerance 1e-10 relative to the largest.
inline bool check_general_position(const Dataset& points) {
  if (points.n < 1 || points.k < 1)
    throw std::invalid_argument("check_general_position: empty point set");
  constexpr double kRelTol = 1e-10;
  const int d = points.k;
  const int lin_size = std::min(points.n, d);
  // a dependent subset of any size extends to a dependent subset of size
  // lin_size, so checking the largest size suffices
  const bool lin_ok = detail::for_each_subset(points.n, lin_size, [&](const std::vector<int>& idx) {
    std::vector<std::vector<double>> m;
    for (int i : idx) {
      auto row = points.row(i);
      m.emplace_back(row.begin(), row.end());
    }
    return detail::numeric_rank(m, kRelTol) == static_cast<std::size_t>(lin_size);
  });
  if (!lin_ok) return false;
  if (points.n < d + 1) return true;
  return detail::for_each_subset(points.n, d + 1, [&](const std::vector<int>& idx) {
    std::vector<std::vector<double>> diff;
    for (std::size_t t = 1; t < idx.size(); ++t) {
      std::vector<double> row(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j) row[j] = points.at(idx[t], j) - points.at(idx[0], j);
      diff.push_back(std::move(row));
    }
    return detail::numeric_rank(diff, kRelTol) == static_cast<std::size_t>(d);
  });
}

}  // namespace capmeter
