#include <catch2/catch_amalgamated.hpp>

#include "sbpsat/sbp.hpp"

using namespace sbpsat;

TEST_CASE("second-order operator coefficients") {
  auto s = build_sbp(2, GridLine1D::over(0, 1, 21));
  REQUIRE(s.h == Catch::Approx(0.05));
  REQUIRE(s.H(0) == Catch::Approx(0.5 * s.h));
  REQUIRE(s.H(10) == Catch::Approx(s.h));
  REQUIRE(s.D1(10, 9) == Catch::Approx(-0.5 / s.h));
  REQUIRE(s.D1(10, 11) == Catch::Approx(0.5 / s.h));
  REQUIRE(s.alpha == Catch::Approx(0.4));
}

TEST_CASE("fourth-order operator coefficients") {
  auto s = build_sbp(4, GridLine1D::over(0, 1, 21));
  REQUIRE(s.H(0) == Catch::Approx(17.0 / 48 * s.h));
  REQUIRE(s.H(1) == Catch::Approx(59.0 / 48 * s.h));
  REQUIRE(s.H(2) == Catch::Approx(43.0 / 48 * s.h));
  REQUIRE(s.H(3) == Catch::Approx(49.0 / 48 * s.h));
  REQUIRE(s.D1(10, 8) == Catch::Approx(1.0 / 12 / s.h));
  REQUIRE(s.D1(10, 9) == Catch::Approx(-2.0 / 3 / s.h));
  REQUIRE(s.D1(10, 10) + 1 == Catch::Approx(1.0));
  REQUIRE(s.alpha == Catch::Approx(0.2508560249));
}

TEST_CASE("operator identities hold to rounding") {
  for (int order : {2, 4}) {
    auto s = build_sbp(order, GridLine1D::over(0, 1, 21));
    auto rep = verify_sbp_identities(s);
    INFO("order " << order);
    REQUIRE(rep.max_residual() < 1e-12);
    REQUIRE(rep.qqt_b < 1e-13);
    REQUIRE(rep.m_symmetry < 1e-12);
  }
}

TEST_CASE("borrowing constant is admissible but not loose") {
  for (int order : {2, 4}) {
    auto s = build_sbp(order, GridLine1D::over(0, 1, 31));
    REQUIRE(verify_borrowing(s) >= -1e-12);
    // 25% above the published constant must break positivity
    REQUIRE(verify_borrowing(s, 1.25 * s.alpha) < 0);
  }
}

TEST_CASE("quadrature integrates low-degree polynomials") {
  auto s2 = build_sbp(2, GridLine1D::over(0, 1, 41));
  auto s4 = build_sbp(4, GridLine1D::over(0, 1, 41));
  VectorXd lin(41), cub(41);
  for (int i = 0; i < 41; ++i) {
    double x = i / 40.0;
    lin(i) = 2 * x + 1;
    cub(i) = x * x * x;
  }
  REQUIRE(quadrature(s2, lin) == Catch::Approx(2.0).margin(1e-13));
  REQUIRE(quadrature(s4, cub) == Catch::Approx(0.25).margin(1e-13));
}

TEST_CASE("refinement leaves scale-free structure unchanged") {
  auto a = build_sbp(4, GridLine1D::over(0, 1, 21));
  auto b = build_sbp(4, GridLine1D::over(0, 1, 41));
  REQUIRE(a.H(0) / a.h == Catch::Approx(b.H(0) / b.h));
  REQUIRE(a.D1(0, 0) * a.h == Catch::Approx(b.D1(0, 0) * b.h));
  REQUIRE(a.D2(0, 0) * a.h * a.h == Catch::Approx(b.D2(0, 0) * b.h * b.h));
}

TEST_CASE("operator input validation") {
  REQUIRE_THROWS_AS(build_sbp(3, GridLine1D::over(0, 1, 21)), UnsupportedOrder);
  REQUIRE_THROWS_AS(build_sbp(6, GridLine1D::over(0, 1, 21)), UnsupportedOrder);
  REQUIRE_THROWS_AS(build_sbp(4, GridLine1D::over(0, 1, 6)), GridTooSmall);
  VectorXd wrong = VectorXd::Ones(5);
  auto s = build_sbp(2, GridLine1D::over(0, 1, 21));
  REQUIRE_THROWS_AS(quadrature(s, wrong), LengthMismatch);
}
