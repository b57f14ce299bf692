#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "surfgrow/field.hpp"
#include "surfgrow/semigroup.hpp"

using namespace surfgrow;

TEST_CASE("semigroup multiplies each mode by its exact decay factor") {
  const double L = 5.0;
  const FourierField u = random_field(L, 10, -1.0, 3, true);
  const double t = 0.013;
  const FourierField v = apply_semigroup(u, t);
  for (int j = -10; j <= 10; ++j) {
    if (j == 0) continue;
    const double k = u.wavenumber(j);
    const Complex expected = u.coeff(j) * std::exp(-t * k * k * k * k);
    CHECK(std::abs(v.coeff(j) - expected) <= 1e-16 * std::abs(expected) + 0.0);
  }
  CHECK_THROWS_AS(apply_semigroup(u, -1e-9), std::invalid_argument);
}

TEST_CASE("semigroup composition and identity") {
  const FourierField u = random_field(kDefaultPeriod, 12, -1.5, 4, true);
  const FourierField id = apply_semigroup(u, 0.0);
  CHECK((id.coeffs() - u.coeffs()).norm() == 0.0);

  const FourierField ab = apply_semigroup(apply_semigroup(u, 0.002), 0.003);
  const FourierField once = apply_semigroup(u, 0.005);
  CHECK((ab.coeffs() - once.coeffs()).norm() < 1e-15 * once.coeffs().norm());
}

TEST_CASE("semigroup contracts every Sobolev norm") {
  const FourierField u = random_field(kDefaultPeriod, 16, -1.0, 5, true);
  double prev[3] = {sobolev_norm(u, 0.0), sobolev_norm(u, 1.0),
                    sobolev_norm(u, 2.0)};
  for (const double t : {1e-4, 1e-3, 1e-2, 1e-1}) {
    const FourierField v = apply_semigroup(u, t);
    const double cur[3] = {sobolev_norm(v, 0.0), sobolev_norm(v, 1.0),
                           sobolev_norm(v, 2.0)};
    for (int i = 0; i < 3; ++i) {
      CHECK(cur[i] <= prev[i]);
      prev[i] = cur[i];
    }
  }
}

TEST_CASE("fractional power acts diagonally") {
  const FourierField u = cosine_field(kDefaultPeriod, 8, 3, 1.0);
  for (const double g : {-0.25, 0.25, 0.5, 1.0}) {
    const FourierField v = apply_fractional_power(u, g);
    const double factor = std::pow(3.0, 4.0 * g);
    CHECK(std::abs(v.coeff(3) - factor * u.coeff(3)) < 1e-13 * factor);
  }

  // A^{1/2} = -d^2/dx^2 on this operator
  const FourierField r = random_field(kDefaultPeriod, 10, -1.0, 6, true);
  const FourierField half = apply_fractional_power(r, 0.5);
  const FourierField neg_lap = -1.0 * derivative(r, 2);
  CHECK((half.coeffs() - neg_lap.coeffs()).norm() <
        1e-13 * neg_lap.coeffs().norm());
}

TEST_CASE("smoothing constant is the sup of x^g e^{-x}") {
  CHECK(smoothing_constant(0.0) == 1.0);
  CHECK(smoothing_constant(1.0) == doctest::Approx(1.0 / std::exp(1.0)));

  // numeric sup oracle on a log grid
  const double g = 0.37;
  double sup = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double x = std::pow(10.0, -6.0 + 9.0 * i / 20000.0);
    sup = std::max(sup, std::pow(x, g) * std::exp(-x));
  }
  CHECK(smoothing_constant(g) == doctest::Approx(sup).epsilon(1e-6));
}

TEST_CASE("smoothing bound holds pathwise") {
  // |A^g e^{-tA} u|_0 <= c_g t^{-g} |u|_0
  const FourierField u = random_field(kDefaultPeriod, 16, -0.5, 7, true);
  const double base = sobolev_norm(u, 0.0);
  for (const double g : {0.25, 0.5, 1.0}) {
    for (const double t : {1e-4, 1e-2, 1.0}) {
      const double lhs =
          sobolev_norm(apply_fractional_power(apply_semigroup(u, t), g), 0.0);
      CHECK(lhs <= smoothing_constant(g) * std::pow(t, -g) * base * (1 + 1e-12));
    }
  }
}

TEST_CASE("k_zero matches the single-mode closed form") {
  // f(s) = s^beta e^{-s m^4} m^{1+alpha} / sqrt(2) peaks at s = beta / m^4
  const double t = 2.0;
  for (const double alpha : {0.1, 0.25, 0.4}) {
    const double beta = (1.0 + 2.0 * alpha) / 8.0;
    for (const int m : {1, 2, 3}) {
      const FourierField u = cosine_field(kDefaultPeriod, 16, m, 1.0);
      const double m4 = std::pow(double(m), 4.0);
      const double s_star = std::min(beta / m4, t);
      const double expected = std::pow(s_star, beta) * std::exp(-s_star * m4) *
                              std::pow(double(m), 1.0 + alpha) /
                              std::sqrt(2.0);
      double arg = 0.0;
      const double got = k_zero(u, alpha, t, &arg);
      CHECK(got == doctest::Approx(expected).epsilon(1e-10));
      CHECK(arg == doctest::Approx(s_star).epsilon(1e-6));
      CHECK(arg > 0.0);
      CHECK(arg <= t);
    }
  }
}

TEST_CASE("k_zero is homogeneous and nondecreasing in the horizon") {
  const FourierField u = random_field(kDefaultPeriod, 12, -1.5, 8, true);
  const double alpha = 0.25;
  const double one = k_zero(u, alpha, 0.5);
  CHECK(k_zero(3.0 * u, alpha, 0.5) == doctest::Approx(3.0 * one).epsilon(1e-12));

  double prev = 0.0;
  for (const double t : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
    const double cur = k_zero(u, alpha, t);
    CHECK(cur >= prev * (1 - 1e-12));
    prev = cur;
  }
}

TEST_CASE("k_zero input validation") {
  const FourierField u = cosine_field(kDefaultPeriod, 8, 1, 1.0);
  CHECK_THROWS_AS(k_zero(u, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(k_zero(u, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(k_zero(u, 0.25, 0.0), std::invalid_argument);
}
