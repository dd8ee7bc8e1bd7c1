#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pairstat/detection.hpp"

using namespace pairstat;

TEST_SUITE("detection") {

TEST_CASE("click probability reference values") {
  CHECK(click_prob({0.3, 0.0}, 1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(click_prob({0.3, 0.0}, 2) == doctest::Approx(0.51).epsilon(1e-15));
  CHECK(click_prob({0.0, 0.01}, 5) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(click_prob({0.3, 0.02}, 0) == 0.02);
  CHECK(click_prob({1.0, 0.0}, 3) == 1.0);
  CHECK(click_prob({1.0, 0.0}, 0) == 0.0);
  // 1 - (1-d)(1-α)^x
  CHECK(click_prob({0.2, 0.1}, 3) == doctest::Approx(1.0 - 0.9 * 0.512).epsilon(1e-15));
}

TEST_CASE("linearized model") {
  const DetectorModel lin{0.2, 0.01, ClickModel::Linearized};
  CHECK(click_prob(lin, 0) == 0.01);
  CHECK(click_prob(lin, 7) == doctest::Approx(1.41));  // may exceed one
}

TEST_CASE("exact clicks are monotone in x, alpha and dark") {
  for (double a : {0.0, 0.05, 0.5, 0.9}) {
    for (double d : {0.0, 1e-4, 0.3}) {
      for (int x = 0; x < 40; ++x) {
        CHECK(click_prob({a, d}, x + 1) >= click_prob({a, d}, x));
        CHECK(click_prob({a + 0.05, d}, x) >= click_prob({a, d}, x));
        CHECK(click_prob({a, d + 0.05}, x) >= click_prob({a, d}, x));
      }
    }
  }
}

TEST_CASE("exact and linearized agree to second order") {
  for (double a : {1e-4, 1e-3, 1e-2, 0.05}) {
    for (double d : {0.0, 1e-5, 1e-3, 0.02}) {
      for (int x = 0; x <= 60; ++x) {
        const double lin = x * a + d;
        if (lin > 0.1) continue;
        const double exact = click_prob({a, d, ClickModel::Exact}, x);
        CHECK(std::abs(exact - lin) <= lin * lin);
      }
    }
  }
}

TEST_CASE("click table") {
  const DetectorModel det{0.1, 1e-3};
  const auto t = click_table(det, 12);
  REQUIRE(t.size() == 13);
  for (int x = 0; x <= 12; ++x) CHECK(t[x] == click_prob(det, x));
}

TEST_CASE("detector validation") {
  CHECK_THROWS_AS((DetectorModel{-0.1, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((DetectorModel{1.1, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((DetectorModel{0.1, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((DetectorModel{NAN, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS(click_prob({0.1, 0.0}, -1), std::invalid_argument);
  CHECK_THROWS_AS(click_table({0.1, 0.0}, -1), std::invalid_argument);
}

}  // TEST_SUITE
