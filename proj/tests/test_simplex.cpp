#include <doctest.h>

#include <stdexcept>

#include "capmeter/simplex.hpp"

using capmeter::phase_one_feasible;

TEST_CASE("feasible equality system") {
  // x1 + x2 = 1, x >= 0
  const auto r = phase_one_feasible({{1.0, 1.0}}, {1.0});
  CHECK(r.feasible);
  CHECK(r.infeasibility < 1e-9);
}

TEST_CASE("contradictory rows are infeasible with the right gap") {
  // x1 + x2 = 1 and x1 + x2 = 3 cannot both hold
  const auto r = phase_one_feasible({{1.0, 1.0}, {1.0, 1.0}}, {1.0, 3.0});
  CHECK_FALSE(r.feasible);
  CHECK(r.infeasibility == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("zero right-hand side is trivially feasible") {
  const auto r = phase_one_feasible({{2.0, -1.0}, {1.0, 4.0}}, {0.0, 0.0});
  CHECK(r.feasible);
}

TEST_CASE("bounded variables reach a tight corner") {
  // x1 = 5 with x1 appearing in a second balanced row
  const auto r = phase_one_feasible({{1.0, 0.0}, {1.0, -1.0}}, {5.0, 0.0});
  CHECK(r.feasible);
}

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(phase_one_feasible({{1.0}}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(phase_one_feasible({{1.0, 2.0}, {1.0}}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(phase_one_feasible({{1.0}}, {-1.0}), std::invalid_argument);
}
