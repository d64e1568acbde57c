#include <doctest.h>

#include <stdexcept>

#include "capmeter/threshold.hpp"

using capmeter::BigCount;
using capmeter::tnk_closed;
using capmeter::tnk_recursive;

TEST_CASE("base cases and published values") {
  CHECK(tnk_recursive(1, 5) == BigCount(2));
  CHECK(tnk_recursive(5, 1) == BigCount(2));
  CHECK(tnk_closed(4, 3) == BigCount(14));  // the XOR example: 14 of 16
  CHECK(tnk_recursive(4, 3) == BigCount(14));
  CHECK(tnk_closed(6, 3) == BigCount(32));  // 2*(C(5,0)+C(5,1)+C(5,2))
  CHECK(tnk_closed(3, 7) == BigCount(8));   // saturated: 2^3
  CHECK(tnk_closed(8, 4) == BigCount(128));
  CHECK(tnk_closed(40, 20) == BigCount::pow2(39));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(tnk_closed(0, 3), std::domain_error);
  CHECK_THROWS_AS(tnk_closed(3, 0), std::domain_error);
  CHECK_THROWS_AS(tnk_recursive(-1, 2), std::domain_error);
  CHECK_THROWS_AS(capmeter::theoretical_curve(0, 5), std::domain_error);
  CHECK_THROWS_AS(capmeter::theoretical_curve(2, 0), std::domain_error);
}

TEST_CASE("saturation: T(n,k) = 2^n for k >= n") {
  for (int n = 1; n <= 64; ++n) {
    CHECK(tnk_closed(n, n) == BigCount::pow2(static_cast<unsigned>(n)));
    CHECK(tnk_closed(n, n + 7) == BigCount::pow2(static_cast<unsigned>(n)));
  }
  CHECK(tnk_closed(200, 200) == BigCount::pow2(200));
}

TEST_CASE("half point: T(2k,k) = 2^(2k-1)") {
  for (int k = 1; k <= 64; ++k)
    CHECK(tnk_closed(2 * k, k) == BigCount::pow2(static_cast<unsigned>(2 * k - 1)));
}

TEST_CASE("Pascal identity and closed-form equivalence up to 200") {
  for (int n = 2; n <= 200; ++n)
    for (int k = 2; k < n; ++k) {
      const BigCount lhs = tnk_recursive(n, k);
      CHECK(lhs == tnk_recursive(n - 1, k) + tnk_recursive(n - 1, k - 1));
    }
  for (int n = 1; n <= 200; ++n)
    for (int k = 1; k <= 200; ++k)
      CHECK(tnk_recursive(n, k) == tnk_closed(n, k));
}

TEST_CASE("cache cap falls back to the closed form") {
  capmeter::TnkCache tiny(16);
  CHECK(tiny.recursive(50, 3) == tnk_closed(50, 3));
  CHECK(tiny.recursive(3, 3) == BigCount(8));
}

TEST_CASE("theoretical curve values and monotonicity") {
  const auto pts = capmeter::theoretical_curve(3, 40);
  REQUIRE(pts.size() == 40);
  CHECK(pts[2].n == 3);
  CHECK(pts[2].fraction == 1.0);  // n <= k shatters completely
  CHECK(pts[5].n == 6);
  CHECK(pts[5].fraction == 0.5);  // T(2k,k) = half of 2^(2k)
  CHECK(pts[0].x == doctest::Approx(1.0 / 3.0));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].fraction >= 0.0);
    CHECK(pts[i].fraction <= 1.0);
    CHECK((pts[i].fraction == 1.0) == (pts[i].n <= 3));
    if (i > 0) CHECK(pts[i].fraction <= pts[i - 1].fraction);
  }

  const auto k1 = capmeter::theoretical_curve(1, 6);
  CHECK(k1[3].fraction == 0.125);  // T(4,1)/2^4 = 2/16

  // very long sweep stays monotone and exact at the saturated head
  const auto k5 = capmeter::theoretical_curve(5, 120);
  for (std::size_t i = 1; i < k5.size(); ++i) CHECK(k5[i].fraction <= k5[i - 1].fraction);
  CHECK(k5[4].fraction == 1.0);
}

TEST_CASE("ideal points") {
  const auto p1 = capmeter::ideal_points(1);
  CHECK(p1.vc == 1);
  CHECK(p1.mk == 2);
  const auto p10 = capmeter::ideal_points(10);
  CHECK(p10.vc == 10);
  CHECK(p10.mk == 20);
  const auto p4 = capmeter::ideal_points(4);
  CHECK(p4.mk == 8);
  CHECK(tnk_closed(8, 4) == BigCount(128));
}
