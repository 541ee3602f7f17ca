#include "discwalk/spline.hpp"

#include <algorithm>

#include "discwalk/errors.hpp"

namespace discwalk {

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
  const std::size_t n = x_.size();
  if (n != y_.size()) throw InputError("spline abscissae and ordinates differ in length");
  if (n < 4) throw InputError("not-a-knot spline needs at least 4 knots");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw InputError("spline knots must be strictly increasing");
  }

  std::vector<double> h(n - 1), slope(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    slope[i] = (y_[i + 1] - y_[i]) / h[i];
  }

  // Tridiagonal system for M_1 .. M_{n-2}; end values eliminated by not-a-knot.
  const std::size_t m = n - 2;
  std::vector<double> lower(m, 0.0), diag(m), upper(m, 0.0), rhs(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = r + 1;
    lower[r] = h[i - 1];
    diag[r] = 2.0 * (h[i - 1] + h[i]);
    upper[r] = h[i];
    rhs[r] = 6.0 * (slope[i] - slope[i - 1]);
  }
  {
    const double h0 = h[0], h1 = h[1];
    diag[0] += h0 * (h0 + h1) / h1;
    upper[0] -= h0 * h0 / h1;
    lower[0] = 0.0;
  }
  {
    const double a = h[n - 3], b = h[n - 2];
    diag[m - 1] += b * (a + b) / a;
    lower[m - 1] -= b * b / a;
    upper[m - 1] = 0.0;
  }

  for (std::size_t r = 1; r < m; ++r) {
    const double w = lower[r] / diag[r - 1];
    diag[r] -= w * upper[r - 1];
    rhs[r] -= w * rhs[r - 1];
  }
  std::vector<double> sol(m);
  sol[m - 1] = rhs[m - 1] / diag[m - 1];
  for (std::size_t r = m - 1; r-- > 0;) sol[r] = (rhs[r] - upper[r] * sol[r + 1]) / diag[r];

  for (std::size_t r = 0; r < m; ++r) m_[r + 1] = sol[r];
  m_[0] = ((h[0] + h[1]) * m_[1] - h[0] * m_[2]) / h[1];
  {
    const double a = h[n - 3], b = h[n - 2];
    m_[n - 1] = ((a + b) * m_[n - 2] - b * m_[n - 3]) / a;
  }
}

std::size_t CubicSpline::segment(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto idx = static_cast<std::ptrdiff_t>(it - x_.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(x_.size()) - 2));
}

void CubicSpline::evaluate(double x, double& value, double& slope) const {
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double a = x_[i + 1] - x;
  const double b = x - x_[i];
  const double ca = y_[i] / h - m_[i] * h / 6.0;
  const double cb = y_[i + 1] / h - m_[i + 1] * h / 6.0;
  value = (m_[i] * a * a * a + m_[i + 1] * b * b * b) / (6.0 * h) + ca * a + cb * b;
  slope = (m_[i + 1] * b * b - m_[i] * a * a) / (2.0 * h) + cb - ca;
}

double CubicSpline::operator()(double x) const {
  double v, s;
  evaluate(x, v, s);
  return v;
}

double CubicSpline::derivative(double x) const {
  double v, s;
  evaluate(x, v, s);
  return s;
}

}  // namespace discwalk
