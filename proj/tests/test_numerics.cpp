#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/special_functions/airy.hpp>

#include "discwalk/errors.hpp"
#include "discwalk/numerics.hpp"

using namespace discwalk;
using namespace discwalk::numerics;

namespace {

// Composite trapezoid on a dense uniform grid; the tail beyond `hi` is negligible
// for the Airy integrands used here.
template <typename F>
double dense_trapezoid(F f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double s = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) s += f(lo + i * h);
  return s * h;
}

}  // namespace

TEST_CASE("airy_ai matches the boost oracle on [-20, 20]") {
  double worst = 0.0;
  for (double x = -20.0; x <= 20.0; x += 0.0137) worst = std::max(worst, std::abs(airy_ai(x) - boost::math::airy_ai(x)));
  CHECK(worst < 1e-12);
}

TEST_CASE("airy_ai_prime matches the boost oracle on [-20, 20]") {
  double worst = 0.0;
  for (double x = -20.0; x <= 20.0; x += 0.0137) {
    worst = std::max(worst, std::abs(airy_ai_prime(x) - boost::math::airy_ai_prime(x)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("airy values at the origin") {
  CHECK(airy_ai(0.0) == doctest::Approx(std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0)).epsilon(1e-14));
  CHECK(airy_ai(0.0) == doctest::Approx(0.3550280539).epsilon(1e-10));
  CHECK(airy_ai_prime(0.0) == doctest::Approx(-std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0)).epsilon(1e-14));
  CHECK(airy_ai_prime(0.0) == doctest::Approx(-0.2588194038).epsilon(1e-10));
}

TEST_CASE("airy decays on the positive axis") {
  CHECK(airy_ai(10.0) > 0.0);
  CHECK(airy_ai(10.0) < 1e-9);
  CHECK(airy_ai(40.0) >= 0.0);
  for (double x = 0.0; x < 15.0; x += 0.25) CHECK(airy_ai(x + 0.25) < airy_ai(x));
}

TEST_CASE("airy rejects non-finite input") {
  CHECK_THROWS_AS(airy_ai(std::numeric_limits<double>::quiet_NaN()), DomainError);
  CHECK_THROWS_AS(airy_ai_prime(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("first zero of Ai") {
  const double a1 = airy_first_zero();
  CHECK(std::abs(a1 + 2.33811) <= 1e-5);
  CHECK(std::abs(airy_ai(a1)) < 1e-12);
  CHECK(std::abs(airy_ai(-2.33811)) < 1e-5);
  CHECK(a1 == doctest::Approx(boost::math::airy_ai_zero<double>(1)).epsilon(1e-14));
  CHECK(airy_ai_prime(a1) > 0.0);
  CHECK(airy_ai_prime(a1) == doctest::Approx(0.70121).epsilon(1e-5));
}

TEST_CASE("first zero of Ai'") {
  const double z = airy_prime_first_zero();
  CHECK(z == doctest::Approx(-1.01879).epsilon(1e-5));
  CHECK(std::abs(airy_ai_prime(z)) < 1e-12);
}

TEST_CASE("zeros are ordered and match the oracle") {
  double previous = 0.0;
  for (int k = 1; k <= 6; ++k) {
    const auto z = airy_zero(k);
    CHECK(z.index == k);
    CHECK(z.location < previous);
    CHECK(z.location == doctest::Approx(boost::math::airy_ai_zero<double>(k)).epsilon(1e-13));
    CHECK(std::abs(airy_ai(z.location)) < 1e-12);
    previous = z.location;
  }
  CHECK_THROWS_AS(airy_zero(0), InputError);
}

TEST_CASE("derivative consistency by central differences") {
  for (double x : {-2.0, 0.0, 2.0}) {
    double previous = 0.0;
    for (double h : {1e-2, 5e-3}) {
      const double fd = (airy_ai(x + h) - airy_ai(x - h)) / (2.0 * h);
      const double err = std::abs(fd - airy_ai_prime(x));
      CHECK(err < h * h);
      if (previous > 0.0) CHECK(err / previous == doctest::Approx(0.25).epsilon(0.05));
      previous = err;
    }
  }
}

TEST_CASE("Airy equation Ai'' = x Ai on [-10, 10]") {
  const double h = 1e-3;
  for (double x = -10.0; x <= 10.0; x += 0.25) {
    const double second = (airy_ai_prime(x - 2 * h) - 8 * airy_ai_prime(x - h) + 8 * airy_ai_prime(x + h) -
                           airy_ai_prime(x + 2 * h)) /
                          (12 * h);
    CHECK(std::abs(second - x * airy_ai(x)) <= 1e-8);
  }
}

TEST_CASE("integrate on finite intervals") {
  CHECK(integrate([](double x) { return x; }, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) == doctest::Approx(2.0).epsilon(1e-13));
  const auto r = integrate_with_error([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  CHECK(r.error >= 0.0);
}

TEST_CASE("integrate on a semi-infinite interval") {
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, kInfinity) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::exp(-x * x); }, 0.0, kInfinity) ==
        doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-12));
}

TEST_CASE("Airy square and moment identities") {
  const double a1 = airy_first_zero();
  const double slope = airy_ai_prime(a1);
  const Quadrature q{.abs_tol = 1e-30, .rel_tol = 1e-13};
  auto sq = [&](double x) { return airy_ai(x + a1) * airy_ai(x + a1); };
  auto moment = [&](double x) { return x * sq(x); };
  const double i0 = integrate(sq, 0.0, kInfinity, q);
  const double i1 = integrate(moment, 0.0, kInfinity, q);
  CHECK(i0 == doctest::Approx(slope * slope).epsilon(1e-10));
  CHECK(i1 == doctest::Approx(2.0 / 3.0 * std::abs(a1) * slope * slope).epsilon(1e-10));
  CHECK(i0 == doctest::Approx(0.49170).epsilon(1e-4));
  CHECK(i1 == doctest::Approx(0.76648).epsilon(1e-4));

  // Independent route: dense trapezoid with the boost Airy function.
  auto sq_oracle = [&](double x) {
    const double v = boost::math::airy_ai(x + a1);
    return v * v;
  };
  CHECK(dense_trapezoid(sq_oracle, 0.0, 30.0, 200000) == doctest::Approx(i0).epsilon(1e-9));
  CHECK(dense_trapezoid([&](double x) { return x * sq_oracle(x); }, 0.0, 30.0, 200000) ==
        doctest::Approx(i1).epsilon(1e-9));
}

TEST_CASE("integrate is linear") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = coef(gen), b = coef(gen), c = coef(gen), d = coef(gen);
    const double alpha = coef(gen), beta = coef(gen);
    auto f = [&](double x) { return std::sin(a * x + b); };
    auto g = [&](double x) { return std::exp(-c * c * x * x) * std::cos(d * x); };
    const Quadrature q;
    const double lhs = integrate([&](double x) { return alpha * f(x) + beta * g(x); }, -1.0, 2.0, q);
    const double rhs = alpha * integrate(f, -1.0, 2.0, q) + beta * integrate(g, -1.0, 2.0, q);
    CHECK(std::abs(lhs - rhs) <= 2.0 * std::max(q.abs_tol, q.rel_tol * std::abs(lhs)) + 1e-15);
  }
}

TEST_CASE("integrate reports failures") {
  const Quadrature q{.abs_tol = 1e-15, .rel_tol = 1e-15, .max_depth = 1};
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, q),
                  AccuracyError);
  try {
    integrate([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, q);
  } catch (const AccuracyError& e) {
    CHECK(std::isfinite(e.best_estimate()));
    CHECK(e.error_bound() > 0.0);
  }
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, kInfinity), AccuracyError);
  CHECK_THROWS_AS(integrate([](double x) { return x; }, 1.0, 0.0), InputError);
  CHECK_THROWS_AS((Quadrature{.abs_tol = 0.0}.validate()), InputError);
  CHECK_THROWS_AS((Quadrature{.max_depth = 0}.validate()), InputError);
}

TEST_CASE("find_root") {
  CHECK(find_root([](double x) { return x - 1.0; }, 0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(find_root([](double x) { return x * x - 2.0; }, 1.0, 2.0, 1e-12) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(find_root([](double x) { return airy_ai(x); }, -3.0, -2.0) == doctest::Approx(airy_first_zero()).epsilon(1e-14));
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), BracketError);
}
