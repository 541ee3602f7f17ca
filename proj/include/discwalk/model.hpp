#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "discwalk/spline.hpp"

namespace discwalk {

/// Disc radius R, tangential speed V, diffusion coefficient D.
struct PhysicalParams {
  double R = 1.0;
  double V = 0.0;
  double D = 1.0;

  PhysicalParams() = default;
  /// Throws InputError unless R > 0, D > 0, V >= 0 (all finite).
  PhysicalParams(double R_, double V_, double D_);

  /// Mean of v_phi / rho under the stationary law, in radians per unit time.
  double angular_rate() const { return V / R; }
  /// The same rate counted in full turns per unit time, V / (2 pi R).
  double turn_rate() const;
};

/// Localization scale R / mu^{1/3} with mu = (1 + V^2 R^2 / D^2) / 2.
double strip_width(const PhysicalParams& params);

/// Strictly increasing radial nodes, first node at the disc radius.
class RadialGrid {
 public:
  static constexpr std::size_t kMinNodes = 16;
  static constexpr std::size_t kDefaultNodes = 2048;

  explicit RadialGrid(std::vector<double> nodes);

  static RadialGrid uniform(double R, double R_max, std::size_t count);
  /// Quadratic map rho = R + L s (1 + s) / 2; spacing at the wall is half the mean.
  static RadialGrid clustered(double R, double R_max, std::size_t count);
  /// Clustered grid on [R, R + 15 * strip_width].
  static RadialGrid for_params(const PhysicalParams& params, std::size_t count = kDefaultNodes);

  double R() const noexcept { return nodes_.front(); }
  double R_max() const noexcept { return nodes_.back(); }
  std::size_t size() const noexcept { return nodes_.size(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  std::span<const double> nodes() const noexcept { return nodes_; }

 private:
  std::vector<double> nodes_;
};

struct QuadratureValue {
  double value = 0.0;
  double error = 0.0;
};

/// Radial probability density P(rho) sampled on a grid.
///
/// Between nodes the amplitude Q = sqrt(P) is interpolated by a not-a-knot
/// cubic spline and P = Q^2, so P stays non-negative and P' = 2 Q Q'. Outside
/// [R, R_max] the density is zero. Normalization is not enforced; see
/// `normalization()` and `normalized()`.
class RadialDensity {
 public:
  RadialDensity(RadialGrid grid, std::vector<double> values);

  const RadialGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double R() const noexcept { return grid_.R(); }
  double R_max() const noexcept { return grid_.R_max(); }

  double operator()(double rho) const;
  double derivative(double rho) const;
  double amplitude(double rho) const;
  /// Q and Q' in one spline lookup; both zero outside the grid.
  void amplitude_and_slope(double rho, double& q, double& dq) const;

  /// Integral over [R, R_max] of g(rho, Q(rho), Q'(rho)).
  /// Five-point Gauss-Legendre per grid segment; error is |GL5 - GL3|.
  QuadratureValue integrate(const std::function<double(double, double, double)>& g) const;

  /// 2 pi * integral of rho P.
  double normalization() const;
  RadialDensity normalized() const;

  /// Cumulative probability with area weight 2 pi rho, scaled so cdf(R_max) = 1.
  double cdf(double rho) const;
  double quantile(double u) const;

  /// Index of the node with the largest value.
  std::size_t peak_index() const noexcept { return peak_; }

 private:
  double segment_mass(double lo, double hi) const;

  RadialGrid grid_;
  std::vector<double> values_;
  CubicSpline amplitude_;
  std::vector<double> cumulative_;  // unnormalized 2 pi rho P mass up to each node
  std::size_t peak_ = 0;
};

/// Rotation-invariant drift (v_rho, v_phi) on (R, R_max].
struct DriftField {
  std::function<double(double)> radial;
  std::function<double(double)> tangential;
  double rho_min = 0.0;
  double rho_max = 0.0;
};

/// v_rho = D P'/P = 2 D Q'/Q. Where Q vanishes the value is +infinity on the
/// wall side of the peak and -infinity beyond it.
class RadialDrift {
 public:
  RadialDrift(const RadialDensity& density, double D);

  double operator()(double rho) const;
  /// Values at the grid nodes; node 0 is +infinity when P(R) = 0.
  std::span<const double> nodal() const noexcept { return nodal_; }
  bool singular_at(std::size_t i) const { return std::isinf(nodal_[i]); }

 private:
  std::shared_ptr<const RadialDensity> density_;
  double D_;
  double peak_rho_;
  std::vector<double> nodal_;
};

/// v_phi = |lambda| / rho with |lambda| = V / (2 pi R C).
class AngularDrift {
 public:
  explicit AngularDrift(double strength) : strength_(strength) {}
  double operator()(double rho) const { return strength_ / rho; }
  double strength() const noexcept { return strength_; }

 private:
  double strength_;
};

/// Throws DensityError if P <= 0 at an interior node.
RadialDrift radial_drift(const RadialDensity& density, const PhysicalParams& params);

/// C = integral of P / rho over [R, R_max].
double winding_constant(const RadialDensity& density);
QuadratureValue winding_constant_with_error(const RadialDensity& density);

/// Throws DensityError when C = 0.
AngularDrift angular_drift(const RadialDensity& density, const PhysicalParams& params);

/// 2 pi * integral of (v_phi / rho) P rho.
double mean_angular_velocity(const RadialDensity& density, const std::function<double(double)>& v_phi);

/// Drift field of the tilted process for `density`.
DriftField drift_field(const RadialDensity& density, const PhysicalParams& params);

// Text formats. Numbers are written with 17 significant digits.
std::string density_to_csv(const RadialDensity& density, std::string_view comment = {});
RadialDensity density_from_csv(std::string_view text);
nlohmann::json density_to_json(const RadialDensity& density);
RadialDensity density_from_json(const nlohmann::json& j);

std::string format_double(double x);

}  // namespace discwalk
