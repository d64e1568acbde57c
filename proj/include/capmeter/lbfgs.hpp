#pragma once

// Limited-memory BFGS with a strong-Wolfe line search (two-loop recursion,
// bracketing plus cubic-interpolation zoom). Single-shot and stateless:
// restart policy belongs to the caller. With history_size = 0 the method
// degenerates to gradient descent with the same line search.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace capmeter {

struct OptimizerConfig {
  int history_size = 10;
  int max_iterations = 500;
  double grad_tolerance = 1e-7;   // on the infinity norm of the gradient
  double loss_tolerance = 1e-10;  // relative decrease per accepted step
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search_steps = 30;  // objective evaluations per line search

  void validate() const {
    if (history_size < 0) throw std::invalid_argument("history_size must be >= 0");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (max_line_search_steps < 1)
      throw std::invalid_argument("max_line_search_steps must be >= 1");
    if (!(0.0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0))
      throw std::invalid_argument("need 0 < c1 < c2 < 1");
    if (grad_tolerance < 0.0 || loss_tolerance < 0.0)
      throw std::invalid_argument("tolerances must be >= 0");
  }
};

enum class Termination { grad_tol, loss_tol, max_iter, line_search_failure };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::grad_tol: return "grad_tol";
    case Termination::loss_tol: return "loss_tol";
    case Termination::max_iter: return "max_iter";
    case Termination::line_search_failure: return "line_search_failure";
  }
  return "?";
}

struct OptimizeResult {
  std::vector<double> final_params;  // best iterate seen
  double final_loss = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  Termination termination = Termination::max_iter;
};

/// Objective: writes the gradient at x and returns the loss.
using Objective = std::function<double(std::span<const double>, std::span<double>)>;

/// Per-accepted-step report, enough to audit the Wolfe conditions:
/// f_after <= f_before + c1 * step * dir_deriv_before and
/// |dir_deriv_after| <= c2 * |dir_deriv_before|.
struct StepInfo {
  int iteration;
  double step;
  double f_before;
  double f_after;
  double dir_deriv_before;
  double dir_deriv_after;
};
using StepObserver = std::function<void(const StepInfo&)>;

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Minimizer of the cubic through (a, fa, da) and (b, fb, db); falls back to
// bisection when the interpolant is degenerate or the root leaves [a, b].
inline double cubic_min(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (disc < 0.0 || !std::isfinite(disc)) return 0.5 * (a + b);
  const double d2 = std::sqrt(disc) * (b > a ? 1.0 : -1.0);
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0) return 0.5 * (a + b);
  double x = b - (b - a) * (db + d2 - d1) / denom;
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double guard = 0.1 * (hi - lo);
  if (!std::isfinite(x) || x < lo + guard || x > hi - guard) return 0.5 * (a + b);
  return x;
}

struct LinePoint {
  double alpha = 0.0;
  double phi = 0.0;   // f(x + alpha d)
  double dphi = 0.0;  // g(x + alpha d) . d
};

// Strong-Wolfe line search (bracketing + zoom). On success x/f/g hold the
// accepted point and the return value is the accepted step; returns 0 on
// failure with x/f/g untouched.
class LineSearch {
 public:
  LineSearch(const Objective& obj, const OptimizerConfig& cfg, std::span<const double> x0,
             std::span<const double> dir, double f0, double dphi0)
      : obj_(obj), cfg_(cfg), x0_(x0), dir_(dir), phi0_(f0), dphi0_(dphi0),
        xtrial_(x0.size()), gtrial_(x0.size()) {}

  bool run(std::vector<double>& x_out, double& f_out, std::vector<double>& g_out) {
    LinePoint lo{0.0, phi0_, dphi0_};
    LinePoint cur;
    double alpha = 1.0;
    double alpha_prev = 0.0;
    LinePoint prev = lo;
    bool bracketed = false;
    LinePoint hi;

    while (evals_ < cfg_.max_line_search_steps) {
      if (!bracketed) {
        cur = eval(alpha);
        const bool armijo_fail = !std::isfinite(cur.phi) ||
                                 cur.phi > phi0_ + cfg_.wolfe_c1 * alpha * dphi0_ ||
                                 (evals_ > 1 && cur.phi >= prev.phi);
        if (armijo_fail) {
          lo = prev;
          hi = cur;
          bracketed = true;
          continue;
        }
        if (std::abs(cur.dphi) <= -cfg_.wolfe_c2 * dphi0_) return accept(cur, x_out, f_out, g_out);
        if (cur.dphi >= 0.0) {
          lo = cur;
          hi = prev;
          bracketed = true;
          continue;
        }
        prev = cur;
        alpha_prev = alpha;
        alpha = std::min(2.0 * alpha, 1e10);
        (void)alpha_prev;
      } else {
        // zoom between lo (lowest phi meeting Armijo) and hi
        const double a = cubic_min(lo.alpha, lo.phi, lo.dphi, hi.alpha, hi.phi,
                                   std::isfinite(hi.dphi) ? hi.dphi : 0.0);
        cur = eval(a);
        if (!std::isfinite(cur.phi) || cur.phi > phi0_ + cfg_.wolfe_c1 * a * dphi0_ ||
            cur.phi >= lo.phi) {
          hi = cur;
        } else {
          if (std::abs(cur.dphi) <= -cfg_.wolfe_c2 * dphi0_)
            return accept(cur, x_out, f_out, g_out);
          if (cur.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
          lo = cur;
        }
        if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::abs(lo.alpha)))
          return false;  // interval collapsed without meeting curvature
      }
    }
    return false;
  }

  double accepted_step() const noexcept { return accepted_; }

 private:
  LinePoint eval(double alpha) {
    ++evals_;
    for (std::size_t i = 0; i < x0_.size(); ++i) xtrial_[i] = x0_[i] + alpha * dir_[i];
    const double phi = obj_(xtrial_, gtrial_);
    return {alpha, phi, dot(gtrial_, dir_)};
  }

  bool accept(const LinePoint& p, std::vector<double>& x_out, double& f_out,
              std::vector<double>& g_out) {
    // gtrial_/xtrial_ hold the last evaluation, which is p
    x_out = xtrial_;
    f_out = p.phi;
    g_out = gtrial_;
    accepted_ = p.alpha;
    assert(p.phi <= phi0_ + cfg_.wolfe_c1 * p.alpha * dphi0_ + 1e-12 &&
           "sufficient-decrease condition violated at accepted step");
    assert(std::abs(p.dphi) <= -cfg_.wolfe_c2 * dphi0_ + 1e-12 &&
           "curvature condition violated at accepted step");
    return true;
  }

  const Objective& obj_;
  const OptimizerConfig& cfg_;
  std::span<const double> x0_, dir_;
  double phi0_, dphi0_;
  std::vector<double> xtrial_, gtrial_;
  int evals_ = 0;
  double accepted_ = 0.0;
};

}  // namespace detail

/// Minimizes the objective from x0. Returns the best point evaluated
/// anywhere, line-search trials included (a failed search can terminate the
/// run at a non-smooth valley whose bottom is still worth keeping); the
/// reported loss never exceeds the loss at x0. The optional observer fires
/// after every accepted step.
inline OptimizeResult minimize(const Objective& objective, std::vector<double> x0,
                               const OptimizerConfig& cfg, const StepObserver& observer = {}) {
  cfg.validate();
  const std::size_t dim = x0.size();
  std::vector<double> g(dim);
  double f = objective(x0, g);
  if (!std::isfinite(f)) throw std::invalid_argument("objective not finite at x0");

  OptimizeResult res;
  res.final_params = x0;
  res.final_loss = f;
  if (detail::inf_norm(g) <= cfg.grad_tolerance) {
    res.converged = true;
    res.termination = Termination::grad_tol;
    return res;
  }

  const Objective tracked = [&](std::span<const double> x, std::span<double> grad) {
    const double v = objective(x, grad);
    if (v < res.final_loss) {
      res.final_loss = v;
      res.final_params.assign(x.begin(), x.end());
    }
    return v;
  };

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> history;
  std::vector<double> x = std::move(x0);
  std::vector<double> dir(dim), q(dim);
  std::vector<double> x_new, g_new;
  double gamma = 1.0;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    // two-loop recursion for dir = -H g
    q.assign(g.begin(), g.end());
    std::vector<double> alpha_coef(history.size());
    for (std::size_t i = history.size(); i-- > 0;) {
      const Pair& p = history[i];
      alpha_coef[i] = p.rho * detail::dot(p.s, q);
      for (std::size_t j = 0; j < dim; ++j) q[j] -= alpha_coef[i] * p.y[j];
    }
    for (std::size_t j = 0; j < dim; ++j) q[j] *= gamma;
    for (std::size_t i = 0; i < history.size(); ++i) {
      const Pair& p = history[i];
      const double beta = p.rho * detail::dot(p.y, q);
      for (std::size_t j = 0; j < dim; ++j) q[j] += (alpha_coef[i] - beta) * p.s[j];
    }
    for (std::size_t j = 0; j < dim; ++j) dir[j] = -q[j];

    double dphi0 = detail::dot(g, dir);
    if (dphi0 >= 0.0) {  // not a descent direction; fall back to steepest descent
      history.clear();
      gamma = 1.0;
      for (std::size_t j = 0; j < dim; ++j) dir[j] = -g[j];
      dphi0 = -detail::dot(g, g);
    }

    detail::LineSearch ls(tracked, cfg, x, dir, f, dphi0);
    double f_new = f;
    bool accepted = ls.run(x_new, f_new, g_new);
    if (!accepted && !history.empty()) {
      // stale curvature can propose a direction whose ray has no Wolfe
      // point; retry once from scratch along steepest descent
      history.clear();
      gamma = 1.0;
      for (std::size_t j = 0; j < dim; ++j) dir[j] = -g[j];
      dphi0 = -detail::dot(g, g);
      detail::LineSearch retry(tracked, cfg, x, dir, f, dphi0);
      accepted = retry.run(x_new, f_new, g_new);
      if (accepted && observer)
        observer({iter, retry.accepted_step(), f, f_new, dphi0, detail::dot(g_new, dir)});
    } else if (accepted && observer) {
      observer({iter, ls.accepted_step(), f, f_new, dphi0, detail::dot(g_new, dir)});
    }
    if (!accepted) {
      res.iterations = iter - 1;
      res.termination = Termination::line_search_failure;
      return res;
    }
    // curvature pair; skipped unless s.y is strictly positive
    Pair p;
    p.s.resize(dim);
    p.y.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      p.s[j] = x_new[j] - x[j];
      p.y[j] = g_new[j] - g[j];
    }
    const double sy = detail::dot(p.s, p.y);
    if (cfg.history_size > 0 && sy > 0.0 && std::isfinite(sy)) {
      p.rho = 1.0 / sy;
      gamma = sy / detail::dot(p.y, p.y);
      history.push_back(std::move(p));
      if (static_cast<int>(history.size()) > cfg.history_size) history.pop_front();
    }

    const double f_prev = f;
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    res.iterations = iter;

    if (detail::inf_norm(g) <= cfg.grad_tolerance) {
      res.converged = true;
      res.termination = Termination::grad_tol;
      return res;
    }
    if (std::abs(f_prev - f) <= cfg.loss_tolerance * std::max(1.0, std::abs(f_prev))) {
      res.converged = true;
      res.termination = Termination::loss_tol;
      return res;
    }
  }
  res.termination = Termination::max_iter;
  return res;
}

}  // namespace capmeter
