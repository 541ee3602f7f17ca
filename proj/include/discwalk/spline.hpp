#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace discwalk {

/// Not-a-knot cubic spline through (x_i, y_i) on a strictly increasing grid.
/// Evaluation outside [x_0, x_{n-1}] extrapolates the end cubic.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::span<const double> x, std::span<const double> y);

  double operator()(double x) const;
  double derivative(double x) const;

  /// Value and first derivative in one lookup.
  void evaluate(double x, double& value, double& slope) const;

  /// Index i of the segment [x_i, x_{i+1}] containing x (clamped).
  std::size_t segment(double x) const;

  std::size_t size() const noexcept { return x_.size(); }
  std::span<const double> knots() const noexcept { return x_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at knots
};

}  // namespace discwalk
