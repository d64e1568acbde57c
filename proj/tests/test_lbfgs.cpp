#include <doctest.h>

#include <cmath>
#include <vector>

#include "capmeter/lbfgs.hpp"

using capmeter::minimize;
using capmeter::Objective;
using capmeter::OptimizerConfig;
using capmeter::Termination;

namespace {

const std::vector<double> kCenter{1.0, -2.0, 3.0, -4.0, 5.0};

double quadratic(std::span<const double> x, std::span<double> g) {
  double f = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - kCenter[i];
    f += 0.5 * d * d;
    g[i] = d;
  }
  return f;
}

double rosenbrock(std::span<const double> x, std::span<double> g) {
  const double a = x[0], b = x[1];
  g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
  g[1] = 200.0 * (b - a * a);
  return (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a);
}

}  // namespace

TEST_CASE("convex quadratic converges essentially exactly") {
  const auto res = minimize(quadratic, std::vector<double>(5, 0.0), OptimizerConfig{});
  CHECK(res.converged);
  CHECK(res.iterations <= 10);
  double dist = 0.0;
  for (std::size_t i = 0; i < 5; ++i)
    dist += (res.final_params[i] - kCenter[i]) * (res.final_params[i] - kCenter[i]);
  CHECK(std::sqrt(dist) < 1e-8);
}

TEST_CASE("rosenbrock from the classic start") {
  const auto res = minimize(rosenbrock, {-1.2, 1.0}, OptimizerConfig{});
  CHECK(res.iterations <= 200);
  CHECK(res.final_loss < 1e-6);
  CHECK(res.final_params[0] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("stationary start returns immediately") {
  const auto res = minimize(quadratic, kCenter, OptimizerConfig{});
  CHECK(res.converged);
  CHECK(res.iterations == 0);
  CHECK(res.termination == Termination::grad_tol);
  CHECK(res.final_params == kCenter);
}

TEST_CASE("history 0 degenerates to gradient descent and still solves the quadratic") {
  OptimizerConfig cfg;
  cfg.history_size = 0;
  const auto res = minimize(quadratic, std::vector<double>(5, 0.0), cfg);
  CHECK(res.converged);
  double dist = 0.0;
  for (std::size_t i = 0; i < 5; ++i)
    dist += (res.final_params[i] - kCenter[i]) * (res.final_params[i] - kCenter[i]);
  CHECK(std::sqrt(dist) < 1e-8);
}

TEST_CASE("non-smooth objective fails the line search but keeps the best iterate") {
  const Objective absval = [](std::span<const double> x, std::span<double> g) {
    g[0] = x[0] >= 0.0 ? 1.0 : -1.0;
    return std::abs(x[0]);
  };
  const auto res = minimize(absval, {1.0}, OptimizerConfig{});
  CHECK(res.final_loss <= 1.0);  // never worse than the start
  if (!res.converged) CHECK(res.termination == Termination::line_search_failure);
}

TEST_CASE("strong Wolfe conditions hold at every accepted step") {
  OptimizerConfig cfg;
  int steps = 0;
  const auto res = minimize(rosenbrock, {-1.2, 1.0}, cfg, [&](const capmeter::StepInfo& s) {
    ++steps;
    CHECK(s.f_after <= s.f_before + cfg.wolfe_c1 * s.step * s.dir_deriv_before + 1e-12);
    CHECK(std::abs(s.dir_deriv_after) <= cfg.wolfe_c2 * std::abs(s.dir_deriv_before) + 1e-12);
    CHECK(s.dir_deriv_before < 0.0);  // always a descent direction
  });
  CHECK(steps == res.iterations);
  CHECK(res.final_loss < 1e-6);
}

TEST_CASE("bit-identical reruns") {
  const auto a = minimize(rosenbrock, {-1.2, 1.0}, OptimizerConfig{});
  const auto b = minimize(rosenbrock, {-1.2, 1.0}, OptimizerConfig{});
  CHECK(a.final_params == b.final_params);
  CHECK(a.final_loss == b.final_loss);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("config validation") {
  OptimizerConfig bad;
  bad.wolfe_c1 = 0.95;  // c1 >= c2
  CHECK_THROWS_AS(minimize(quadratic, kCenter, bad), std::invalid_argument);
  bad = OptimizerConfig{};
  bad.max_iterations = 0;
  CHECK_THROWS_AS(minimize(quadratic, kCenter, bad), std::invalid_argument);
  bad = OptimizerConfig{};
  bad.history_size = -1;
  CHECK_THROWS_AS(minimize(quadratic, kCenter, bad), std::invalid_argument);
}
