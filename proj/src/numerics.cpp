#include "discwalk/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "discwalk/errors.hpp"

namespace discwalk::numerics {

namespace {

// Ai(0) = 3^{-2/3} / Gamma(2/3) and -Ai'(0) = 3^{-1/3} / Gamma(1/3).
constexpr long double kAi0 = 0.355028053887817239260063186004183176L;
constexpr long double kMinusAiPrime0 = 0.258819403792806798405183560189203963L;

constexpr double kSeriesLow = -8.0;
constexpr double kSeriesHigh = 7.0;

struct AiryPair {
  double ai;
  double aip;
};

AiryPair maclaurin(double xd) {
  const long double x = xd;
  const long double x3 = x * x * x;
  long double f_term = 1.0L, g_term = x, fp_term = x * x / 2.0L, gp_term = 1.0L;
  long double f = f_term, g = g_term, fp = fp_term, gp = gp_term;
  for (int k = 0; k < 400; ++k) {
    const long double k3 = 3.0L * k;
    f_term *= x3 / ((k3 + 2) * (k3 + 3));
    g_term *= x3 / ((k3 + 3) * (k3 + 4));
    fp_term *= x3 / ((k3 + 3) * (k3 + 5));
    gp_term *= x3 / ((k3 + 1) * (k3 + 3));
    f += f_term;
    g += g_term;
    fp += fp_term;
    gp += gp_term;
    const long double size = std::fabs(f_term) + std::fabs(g_term) + std::fabs(fp_term) +
                             std::fabs(gp_term);
    const long double scale = std::fabs(f) + std::fabs(g) + std::fabs(fp) + std::fabs(gp);
    if (size <= 1e-22L * scale) break;
  }
  return {static_cast<double>(kAi0 * f - kMinusAiPrime0 * g),
          static_cast<double>(kAi0 * fp - kMinusAiPrime0 * gp)};
}

// Coefficients u_k, v_k of the large-argument expansions.
constexpr int kMaxAsymptoticTerms = 60;

struct AsymptoticCoefficients {
  std::array<double, kMaxAsymptoticTerms> u{};
  std::array<double, kMaxAsymptoticTerms> v{};
  AsymptoticCoefficients() {
    u[0] = 1.0;
    v[0] = 1.0;
    for (int k = 1; k < kMaxAsymptoticTerms; ++k) {
      const double kd = k;
      u[k] = u[k - 1] * (6 * kd - 5) * (6 * kd - 3) * (6 * kd - 1) / ((2 * kd - 1) * 216 * kd);
      v[k] = -(6 * kd + 1) / (6 * kd - 1) * u[k];
    }
  }
};

const AsymptoticCoefficients& coefficients() {
  static const AsymptoticCoefficients c;
  return c;
}

// Number of terms to keep: stop at the smallest term of the divergent series.
int truncation(const std::array<double, kMaxAsymptoticTerms>& c, double zeta) {
  double previous = std::abs(c[0]);
  double power = 1.0;
  for (int k = 1; k < kMaxAsymptoticTerms; ++k) {
    power /= zeta;
    const double term = std::abs(c[k]) * power;
    if (term > previous || term < 1e-18) return k;
    previous = term;
  }
  return kMaxAsymptoticTerms;
}

AiryPair positive_asymptotic(double x) {
  const auto& c = coefficients();
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const double prefactor = std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi));
  const double quarter = std::pow(x, 0.25);
  double su = 0.0, sv = 0.0, power = 1.0, sign = 1.0;
  const int nu = truncation(c.u, zeta);
  const int nv = truncation(c.v, zeta);
  for (int k = 0; k < std::max(nu, nv); ++k) {
    if (k < nu) su += sign * c.u[k] * power;
    if (k < nv) sv += sign * c.v[k] * power;
    power /= zeta;
    sign = -sign;
  }
  return {prefactor / quarter * su, -prefactor * quarter * sv};
}

AiryPair negative_asymptotic(double x) {
  const auto& c = coefficients();
  const double z = -x;
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  const double phase = zeta - std::numbers::pi / 4.0;
  const double cs = std::cos(phase);
  const double sn = std::sin(phase);
  const double quarter = std::pow(z, 0.25);
  const double root_pi = std::sqrt(std::numbers::pi);

  auto split = [zeta](const std::array<double, kMaxAsymptoticTerms>& coeff, int n) {
    double even = 0.0, odd = 0.0, power = 1.0;
    for (int k = 0; k < n; ++k) {
      // (-1)^{floor(k/2)} alternation within each parity class.
      const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
      if (k % 2 == 0) {
        even += sign * coeff[k] * power;
      } else {
        odd += sign * coeff[k] * power;
      }
      power /= zeta;
    }
    return std::pair{even, odd};
  };
  const auto [pu, qu] = split(c.u, truncation(c.u, zeta));
  const auto [pv, qv] = split(c.v, truncation(c.v, zeta));
  return {(cs * pu + sn * qu) / (root_pi * quarter), quarter / root_pi * (sn * pv - cs * qv)};
}

AiryPair airy_pair(double x) {
  if (!std::isfinite(x)) throw DomainError("Airy function argument must be finite");
  if (x < kSeriesLow) return negative_asymptotic(x);
  if (x > kSeriesHigh) return positive_asymptotic(x);
  return maclaurin(x);
}

}  // namespace

void Quadrature::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw InputError("quadrature tolerances must be strictly positive");
  }
  if (max_depth < 1) throw InputError("quadrature depth must be at least 1");
}

double airy_ai(double x) { return airy_pair(x).ai; }

double airy_ai_prime(double x) { return airy_pair(x).aip; }

double airy_first_zero() {
  static const double a1 = find_root(airy_ai, -3.0, -2.0, 1e-15);
  return a1;
}

double airy_prime_first_zero() {
  static const double a1p = find_root(airy_ai_prime, -1.5, -0.5, 1e-15);
  return a1p;
}

AiryZero airy_zero(int k) {
  if (k < 1) throw InputError("Airy zero index must be positive");
  if (k == 1) return {1, airy_first_zero()};
  // Leading asymptotic location -(3 pi (4k - 1) / 8)^{2/3}; neighbouring zeros
  // are separated by more than 1.5 for k >= 2, so +-0.5 brackets exactly one.
  const double t = 3.0 * std::numbers::pi * (4.0 * k - 1.0) / 8.0;
  const double guess = -std::pow(t, 2.0 / 3.0);
  return {k, find_root(airy_ai, guess - 0.5, guess + 0.5, 1e-15)};
}

IntegrationResult integrate_with_error(const RealFunction& f, double a, double b,
                                       const Quadrature& q, double panel_width) {
  q.validate();
  if (!std::isfinite(a)) throw InputError("integration lower limit must be finite");
  if (!(a < b)) throw InputError("integration requires a < b");

  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  const auto depth = static_cast<unsigned>(q.max_depth);

  if (std::isfinite(b)) {
    double error = 0.0, l1 = 0.0;
    const double value = Rule::integrate(f, a, b, depth, q.rel_tol, &error, &l1);
    if (!std::isfinite(value)) throw AccuracyError("integrand produced a non-finite value", value, error);
    if (error > std::max(q.abs_tol, q.rel_tol * std::max(std::abs(value), l1))) {
      throw AccuracyError("quadrature did not converge within depth " + std::to_string(q.max_depth),
                          value, error);
    }
    return {value, error};
  }

  if (!(panel_width > 0.0)) throw InputError("panel width must be positive");

  constexpr int kMaxPanels = 400;
  constexpr double kGrowth = 1.25;
  constexpr double kNegligible = 1e-16;

  double peak = 0.0;
  double total = 0.0, total_error = 0.0, total_l1 = 0.0;
  double left = a, width = panel_width;
  int quiet = 0;
  for (int panel = 0; panel < kMaxPanels; ++panel) {
    double panel_max = 0.0;
    auto tracked = [&](double x) {
      const double y = f(x);
      panel_max = std::max(panel_max, std::abs(y));
      return y;
    };
    // Tail panels only need accuracy relative to the running total; asking for
    // q.rel_tol of their own tiny value would chase rounding noise.
    double error = 0.0, l1 = 0.0;
    const double rough = Rule::integrate(tracked, left, left + width, 0, 0.0, &error, &l1);
    double panel_tol = q.rel_tol;
    if (l1 > 0.0) {
      const double target = 0.25 * std::max(q.abs_tol, q.rel_tol * (std::abs(total) + std::abs(rough)));
      panel_tol = std::clamp(target / l1, q.rel_tol, 0.1);
    }
    const double value = Rule::integrate(tracked, left, left + width, depth, panel_tol, &error, &l1);
    if (!std::isfinite(value)) throw AccuracyError("integrand produced a non-finite value", total, total_error);
    total += value;
    total_error += error;
    total_l1 += l1;
    peak = std::max(peak, panel_max);
    quiet = (peak > 0.0 && panel_max < kNegligible * peak) ? quiet + 1 : 0;
    left += width;
    width *= kGrowth;
    if (quiet >= 3) {
      if (total_error > std::max(q.abs_tol, q.rel_tol * std::max(std::abs(total), total_l1))) {
        throw AccuracyError("semi-infinite quadrature error budget exceeded", total, total_error);
      }
      return {total, total_error};
    }
  }
  throw AccuracyError("integrand did not decay within the panel budget", total, total_error);
}

double find_root(const RealFunction& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw InputError("root bracket requires lo < hi");
  if (!(tol > 0.0)) throw InputError("root tolerance must be positive");
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!std::isfinite(flo) || !std::isfinite(fhi) || std::signbit(flo) == std::signbit(fhi)) {
    throw BracketError("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  auto narrow = [tol](double x0, double x1) {
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(x0), std::abs(x1));
    return std::abs(x1 - x0) <= std::max(tol, floor);
  };
  std::uintmax_t iterations = 300;
  const auto [x0, x1] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, narrow, iterations);
  if (!narrow(x0, x1)) {
    throw AccuracyError("root finder exhausted its iteration budget", 0.5 * (x0 + x1), std::abs(x1 - x0));
  }
  if (f(x0) == 0.0) return x0;
  if (f(x1) == 0.0) return x1;
  return 0.5 * (x0 + x1);
}

}  // namespace discwalk::numerics
