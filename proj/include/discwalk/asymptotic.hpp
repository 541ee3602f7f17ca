#pragma once

#include <span>

#include <json.hpp>

#include "discwalk/model.hpp"

// Large-R Airy asymptotics of the stationary radial law.
namespace discwalk::asymptotic {

/// Constants of the Airy profile for a given winding constant C.
/// Omega_sq = 1 + V^2 / (4 pi^2 C^2 D^2 R^2), mu = Omega_sq / 2,
/// v = 2^{1/3} R / Omega_sq^{1/3}, u = |a1| v (boundary at x = -u/v = a1),
/// C1_sq = mu^{1/3} / (2 pi Ai'(a1)^2 R).
struct AsymptoticConstants {
  double mu = 0.0;
  double C = 0.0;
  double C1_sq = 0.0;
  double a1 = 0.0;
  double u = 0.0;
  double v = 0.0;
  double Omega_sq = 0.0;
};

nlohmann::json to_json(const AsymptoticConstants& k);

double omega_sq_of(const PhysicalParams& params, double C);
/// mu = (1 + (V / (2 pi C D R))^2) / 2. Throws InputError unless C > 0.
double mu_of(const PhysicalParams& params, double C);

/// Zeroth-order winding constant 1 / (2 pi R^2).
double leading_constant(const PhysicalParams& params);

AsymptoticConstants constants_for(const PhysicalParams& params, double C);

/// Ground-state multiplier of the linearized problem,
/// (D^2 / R^2) (Omega^2 - 2^{4/3} |a1| Omega^{4/3}).
double linearized_gamma(const PhysicalParams& params, double C);

/// Right-hand side of the first-order self-consistency relation, written as a
/// value of C: (1 - (2^{7/3} / 3) |a1| Omega_sq^{-1/3}) / (2 pi R^2).
double first_order_rhs(const PhysicalParams& params, double C);

/// The same right-hand side obtained by direct quadrature of
///   C1^2 / R^2 * int Ai^2(mu^{1/3} r / R + a1) dr - 2 C1^2 / R^3 * int r Ai^2(...) dr
/// over r in [0, inf), i.e. the closure integral with 1/(R+r)^2 expanded to first order.
double first_order_quadrature(const PhysicalParams& params, double C);

/// Positive root C of 2 pi C R^2 = 1 - (2^{7/3}/3) |a1| Omega_sq(C)^{-1/3},
/// searched on (0, 1 / (pi R^2)]. Throws RegimeError when there is no root.
double self_consistent_constant(const PhysicalParams& params, double tol = 1e-15);

/// Side-by-side values for the first-order constant. The closed-form
/// expansion and the printed correction factor (which carries an extra
/// 1/pi) are informational only.
struct ConstantReport {
  double leading = 0.0;
  double first_order_root = 0.0;
  double large_R_expansion = 0.0;     // (1 - (2^{7/3}/3)|a1|(D/(VR))^{2/3}) / (2 pi R^2)
  double closed_form = 0.0;           // 1/(2 pi R^2) - (2^{4/3}/(3 pi)) |a1| D^2 / (V^2 R^4)
  double closed_form_deviation = 0.0; // (closed_form - root) / root
  double printed_factor = 0.0;        // 4 |a1| / (3 pi mu^{1/3})
  double rederived_factor = 0.0;      // 4 |a1| / (3 mu^{1/3})
  double factor_ratio = 0.0;          // rederived / printed (= pi)
};

ConstantReport constant_report(const PhysicalParams& params);
nlohmann::json to_json(const ConstantReport& r);

/// P(rho) = mu^{1/3} / (2 pi Ai'(a1)^2 R rho) Ai^2(mu^{1/3} (rho - R) / R + a1), rho >= R.
double density_value(const PhysicalParams& params, double C, double rho);

/// Closed form in V, D, R only (mu replaced by V^2 R^2 / (2 D^2)).
double closed_form_density(const PhysicalParams& params, double rho);

/// Profile sampled on RadialGrid::for_params(params); P(R) is exactly zero.
RadialDensity asymptotic_density(const PhysicalParams& params, double C);
RadialDensity asymptotic_density(const PhysicalParams& params, double C, const RadialGrid& grid);

/// Offset rho - R of the maximum of the Airy factor: (a1' - a1) R / mu^{1/3}.
double mode_offset(const PhysicalParams& params, double C);

/// Difference of the 0.75 and 0.25 quantiles (area-weighted).
double interquartile_width(const RadialDensity& density);

/// Least-squares slope of log y against log x.
double log_log_slope(std::span<const double> x, std::span<const double> y);

/// Slope of log(interquartile width) against log R for the leading-order
/// profile. Needs at least 4 radii spanning two decades.
double strip_width_exponent(const PhysicalParams& base, std::span<const double> radii);

}  // namespace discwalk::asymptotic
