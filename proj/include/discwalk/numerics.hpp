#pragma once

#include <functional>
#include <limits>

namespace discwalk::numerics {

using RealFunction = std::function<double(double)>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Accuracy budget for `integrate`.
struct Quadrature {
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
  int max_depth = 20;

  /// Throws InputError unless both tolerances are positive and depth >= 1.
  void validate() const;
};

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
};

/// A zero of Ai on the negative axis; index 1 is the one closest to the origin.
struct AiryZero {
  int index = 0;
  double location = 0.0;
};

// Airy function of the first kind. Absolute error below 1e-12 on |x| <= 20.
// Long-double Maclaurin series on [-8, 7], asymptotic expansions outside.
double airy_ai(double x);
double airy_ai_prime(double x);

/// a_1, the zero of Ai closest to the origin (about -2.33811).
double airy_first_zero();

/// a_1', the zero of Ai' closest to the origin (about -1.01879).
double airy_prime_first_zero();

/// k-th zero of Ai, k >= 1.
AiryZero airy_zero(int k);

/// Integral of f over [a, b]; b may be +infinity.
///
/// Finite intervals use adaptive Gauss-Kronrod. For b = +infinity the axis is
/// cut into panels starting at width `panel_width` and growing by 25% per
/// panel; integration stops once three consecutive panels stay below 1e-16 of
/// the largest |f| seen. Throws AccuracyError (with the best estimate) when the
/// error estimate exceeds max(abs_tol, rel_tol * |I|).
IntegrationResult integrate_with_error(const RealFunction& f, double a, double b,
                                       const Quadrature& q = {}, double panel_width = 1.0);

inline double integrate(const RealFunction& f, double a, double b, const Quadrature& q = {},
                        double panel_width = 1.0) {
  return integrate_with_error(f, a, b, q, panel_width).value;
}

/// Bracketed root of f on [lo, hi]; returns the midpoint of a final bracket no
/// wider than `tol`. Throws BracketError when f(lo) and f(hi) share a sign.
double find_root(const RealFunction& f, double lo, double hi, double tol = 1e-14);

}  // namespace discwalk::numerics
