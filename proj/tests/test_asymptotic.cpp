#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/airy.hpp>

#include "discwalk/asymptotic.hpp"
#include "discwalk/errors.hpp"
#include "discwalk/numerics.hpp"

using namespace discwalk;
using namespace discwalk::asymptotic;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("constants at R = 100") {
  const PhysicalParams p(100.0, 1.0, 1.0);
  const double C = leading_constant(p);
  CHECK(C == doctest::Approx(1.0 / (2.0 * kPi * 1e4)).epsilon(1e-15));
  CHECK(mu_of(p, C) == doctest::Approx(5000.5).epsilon(1e-12));
  CHECK(omega_sq_of(p, C) == doctest::Approx(10001.0).epsilon(1e-12));
  const auto k = constants_for(p, C);
  CHECK(k.a1 == doctest::Approx(-2.33811).epsilon(1e-5));
  CHECK(k.C1_sq == doctest::Approx(std::cbrt(5000.5) / (2 * kPi * std::pow(0.701210, 2) * 100.0)).epsilon(1e-5));
  CHECK(k.v == doctest::Approx(std::cbrt(2.0) * 100.0 / std::cbrt(10001.0)).epsilon(1e-14));
  CHECK(k.u / k.v == doctest::Approx(-k.a1).epsilon(1e-14));
  CHECK_THROWS_AS(mu_of(p, 0.0), InputError);
  CHECK(to_json(k).at("mu").get<double>() == k.mu);
}

TEST_CASE("zero speed gives mu = 1/2") {
  const PhysicalParams p(10.0, 0.0, 1.0);
  CHECK(mu_of(p, leading_constant(p)) == 0.5);
}

TEST_CASE("leading profile is normalized to O(R^{-2/3})") {
  for (double R : {1e2, 1e3, 1e4}) {
    const PhysicalParams p(R, 1.0, 1.0);
    const double mass = asymptotic_density(p, leading_constant(p)).normalization();
    CHECK(std::abs(mass - 1.0) <= 5.0 * std::pow(R, -2.0 / 3.0));
    // rho P is a pure Airy square, so the mass is one up to truncation and rounding.
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("profile against an independent Airy evaluation") {
  const PhysicalParams p(200.0, 1.5, 0.8);
  const double C = leading_constant(p);
  const double mu = mu_of(p, C);
  const double a1 = boost::math::airy_ai_zero<double>(1);
  const double slope = boost::math::airy_ai_prime(a1);
  CHECK(density_value(p, C, p.R) < 1e-30);
  CHECK(density_value(p, C, p.R - 1.0) == 0.0);
  for (double rho = p.R + 0.01; rho < p.R + 5.0; rho += 0.173) {
    const double ai = boost::math::airy_ai(std::cbrt(mu) * (rho - p.R) / p.R + a1);
    const double expected = std::cbrt(mu) / (2 * kPi * slope * slope * p.R * rho) * ai * ai;
    CHECK(density_value(p, C, rho) == doctest::Approx(expected).epsilon(1e-9));
  }
  const auto P = asymptotic_density(p, C);
  CHECK(P.values()[0] == 0.0);
  for (double v : P.values()) CHECK(v >= 0.0);
}

TEST_CASE("closed form agrees with the leading profile at large V R / D") {
  const PhysicalParams p(1000.0, 1.0, 1.0);
  const double C = leading_constant(p);
  const double peak = p.R + mode_offset(p, C);
  for (double rho = p.R + 0.1; rho < p.R + 4.0 * strip_width(p); rho += 0.5) {
    CHECK(closed_form_density(p, rho) == doctest::Approx(density_value(p, C, rho)).epsilon(1e-5));
  }
  CHECK(closed_form_density(p, peak) > 0.0);
}

TEST_CASE("mode offset locates the maximum of the Airy factor") {
  const PhysicalParams p(300.0, 1.0, 1.0);
  const double C = leading_constant(p);
  const double strip = strip_width(p);
  double best = 0.0, arg = 0.0;
  for (double r = 1e-4 * strip; r < 4.0 * strip; r += 1e-4 * strip) {
    const double f = density_value(p, C, p.R + r) * (p.R + r);
    if (f > best) {
      best = f;
      arg = r;
    }
  }
  CHECK(mode_offset(p, C) == doctest::Approx(arg).epsilon(2e-4));
  CHECK(mode_offset(p, C) ==
        doctest::Approx((numerics::airy_prime_first_zero() - numerics::airy_first_zero()) * strip).epsilon(1e-12));
}

TEST_CASE("linearized ground-state multiplier") {
  const PhysicalParams p(100.0, 1.0, 1.0);
  const double C = leading_constant(p);
  const double w = omega_sq_of(p, C);
  const double expected = (w - std::pow(2.0, 4.0 / 3.0) * 2.338107410459767 * std::pow(w, 2.0 / 3.0)) / 1e4;
  CHECK(linearized_gamma(p, C) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(linearized_gamma(p, C) > 0.0);
  const PhysicalParams q(100.0, 1.0, 2.0);
  CHECK(linearized_gamma(q, C) == doctest::Approx(4.0 * (omega_sq_of(q, C) - std::pow(2.0, 4.0 / 3.0) *
                                                                                  2.338107410459767 *
                                                                                  std::pow(omega_sq_of(q, C), 2.0 / 3.0)) /
                                                 1e4)
                                      .epsilon(1e-12));
}

TEST_CASE("first-order root satisfies its defining relation") {
  for (double R : {50.0, 100.0, 400.0, 1e4}) {
    const PhysicalParams p(R, 1.0, 1.0);
    const double C = self_consistent_constant(p);
    CHECK(C > 0.0);
    CHECK(C < leading_constant(p));
    CHECK(first_order_rhs(p, C) == doctest::Approx(C).epsilon(1e-13));
    const double x = 2 * kPi * C * R * R;
    const double rhs = 1.0 - std::pow(2.0, 7.0 / 3.0) / 3.0 * 2.338107410459767 / std::cbrt(omega_sq_of(p, C));
    CHECK(x == doctest::Approx(rhs).epsilon(1e-12));
  }
  CHECK_THROWS_AS(self_consistent_constant(PhysicalParams(100.0, 0.0, 1.0)), RegimeError);
}

TEST_CASE("first-order right-hand side by quadrature") {
  for (double R : {100.0, 1000.0}) {
    const PhysicalParams p(R, 1.0, 1.0);
    const double C = self_consistent_constant(p);
    CHECK(first_order_quadrature(p, C) == doctest::Approx(first_order_rhs(p, C)).epsilon(1e-10));
  }
}

TEST_CASE("constant report") {
  const PhysicalParams p(1000.0, 1.0, 1.0);
  const auto r = constant_report(p);
  CHECK(r.factor_ratio == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(r.leading == leading_constant(p));
  CHECK(r.first_order_root == self_consistent_constant(p));
  const auto far = constant_report(PhysicalParams(1e5, 1.0, 1.0));
  const double gap = std::abs(r.large_R_expansion - r.first_order_root) / r.first_order_root;
  const double far_gap = std::abs(far.large_R_expansion - far.first_order_root) / far.first_order_root;
  CHECK(far_gap < gap / 10.0);
  const auto j = to_json(r);
  CHECK(j.at("correction_factor_ratio").get<double>() == r.factor_ratio);
  CHECK(j.at("status") == "informational");
}

TEST_CASE("strip width scales as R^{1/3}") {
  const std::vector<double> radii{1e2, 1e3, 1e4, 1e5};
  const double slope = strip_width_exponent(PhysicalParams(1.0, 1.0, 1.0), radii);
  CHECK(std::abs(slope - 1.0 / 3.0) <= 0.01);
  const std::vector<double> few{1e2, 1e3, 1e4};
  CHECK_THROWS_AS(strip_width_exponent(PhysicalParams(1.0, 1.0, 1.0), few), InputError);
  const std::vector<double> narrow{1e2, 2e2, 4e2, 8e2};
  CHECK_THROWS_AS(strip_width_exponent(PhysicalParams(1.0, 1.0, 1.0), narrow), InputError);
}

TEST_CASE("interquartile width of the Airy profile") {
  const PhysicalParams p(400.0, 1.0, 1.0);
  const auto P = asymptotic_density(p, leading_constant(p)).normalized();
  const double w = interquartile_width(P);
  CHECK(w > 0.0);
  CHECK(P.cdf(P.quantile(0.75)) - P.cdf(P.quantile(0.25)) == doctest::Approx(0.5).epsilon(1e-10));
  // Area weight rho cancels the 1/rho factor, so in units of the strip width the
  // quartiles are those of Ai^2(x + a1) on x >= 0. Oracle: cumulative trapezoid with boost.
  const double a1 = boost::math::airy_ai_zero<double>(1);
  const int n = 400000;
  const double h = 15.0 / n;
  std::vector<double> cum(n + 1, 0.0);
  double prev = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double ai = boost::math::airy_ai(i * h + a1);
    cum[i] = cum[i - 1] + 0.5 * h * (prev + ai * ai);
    prev = ai * ai;
  }
  auto quartile = [&](double u) {
    int i = 0;
    while (cum[i + 1] < u * cum[n]) ++i;
    return (i + (u * cum[n] - cum[i]) / (cum[i + 1] - cum[i])) * h;
  };
  CHECK(w / strip_width(p) == doctest::Approx(quartile(0.75) - quartile(0.25)).epsilon(1e-6));
}

TEST_CASE("log_log_slope") {
  const std::vector<double> x{1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (double t : x) y.push_back(3.0 * std::pow(t, -0.7));
  CHECK(log_log_slope(x, y) == doctest::Approx(-0.7).epsilon(1e-13));
}
