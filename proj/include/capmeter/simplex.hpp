#pragma once

// Phase-I dense simplex: decides feasibility of {x >= 0 : A x = b} with
// b >= 0 by minimizing the sum of artificial variables. Bland's rule, so
// termination is guaranteed; problem sizes here are tiny (tens of rows).

#include <cmath>
#include <stdexcept>
#include <vector>

namespace capmeter {

struct PhaseOneResult {
  bool feasible = false;
  double infeasibility = 0.0;  // optimal sum of artificials
  int pivots = 0;
};

inline PhaseOneResult phase_one_feasible(const std::vector<std::vector<double>>& A,
                                         const std::vector<double>& b, double eps = 1e-9) {
  const std::size_t m = A.size();
  if (b.size() != m) throw std::invalid_argument("phase_one_feasible: shape mismatch");
  const std::size_t n = m == 0 ? 0 : A[0].size();
  for (const auto& row : A)
    if (row.size() != n) throw std::invalid_argument("phase_one_feasible: ragged matrix");
  for (double v : b)
    if (v < 0.0) throw std::invalid_argument("phase_one_feasible: b must be nonnegative");

  // tableau rows: [A | I_m | b]; objective row prices out the artificial basis
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<double>> t(m, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = 1.0;
    t[i][cols - 1] = b[i];
    basis[i] = n + i;
  }
  std::vector<double> obj(cols, 0.0);  // reduced costs; obj[cols-1] = -objective value
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < cols; ++j) obj[j] -= t[i][j];
  for (std::size_t i = 0; i < m; ++i) obj[n + i] = 0.0;

  PhaseOneResult res;
  const int pivot_cap = 2000 + static_cast<int>(50 * (m + n));
  while (true) {
    // Bland: entering = lowest-index column with negative reduced cost
    std::size_t enter = cols;
    for (std::size_t j = 0; j + 1 < cols; ++j)
      if (obj[j] < -eps) {
        enter = j;
        break;
      }
    if (enter == cols) break;

    // ratio test, lowest basis index breaking ties
    std::size_t leave = m;
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= eps) continue;
      const double ratio = t[i][cols - 1] / t[i][enter];
      if (leave == m || ratio < best - 1e-12 ||
          (std::abs(ratio - best) <= 1e-12 && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // objective bounded below by 0, cannot happen

    const double piv = t[leave][enter];
    for (std::size_t j = 0; j < cols; ++j) t[leave][j] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = t[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
    }
    {
      const double f = obj[enter];
      if (f != 0.0)
        for (std::size_t j = 0; j < cols; ++j) obj[j] -= f * t[leave][j];
    }
    basis[leave] = enter;
    if (++res.pivots > pivot_cap)
      throw std::runtime_error("phase_one_feasible: pivot budget exceeded");
  }

  res.infeasibility = std::max(0.0, -obj[cols - 1]);
  res.feasible = res.infeasibility < eps;
  return res;
}

}  // namespace capmeter
