#include "discwalk/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "discwalk/errors.hpp"
#include "discwalk/numerics.hpp"

namespace discwalk::asymptotic {

namespace {

constexpr double kPi = std::numbers::pi;

double airy_weight() {
  const double slope = numerics::airy_ai_prime(numerics::airy_first_zero());
  return slope * slope;
}

// 2^{7/3} |a1| / 3
double first_order_coefficient() { return std::pow(2.0, 7.0 / 3.0) * std::abs(numerics::airy_first_zero()) / 3.0; }

}  // namespace

nlohmann::json to_json(const AsymptoticConstants& k) {
  return {{"mu", k.mu}, {"C", k.C}, {"C1_sq", k.C1_sq}, {"a1", k.a1},
          {"u", k.u},   {"v", k.v}, {"Omega_sq", k.Omega_sq}};
}

double omega_sq_of(const PhysicalParams& params, double C) {
  if (!(C > 0.0) || !std::isfinite(C)) throw InputError("winding constant C must be positive");
  const double ratio = params.V / (2.0 * kPi * C * params.D * params.R);
  return 1.0 + ratio * ratio;
}

double mu_of(const PhysicalParams& params, double C) { return 0.5 * omega_sq_of(params, C); }

double leading_constant(const PhysicalParams& params) { return 1.0 / (2.0 * kPi * params.R * params.R); }

AsymptoticConstants constants_for(const PhysicalParams& params, double C) {
  AsymptoticConstants k;
  k.C = C;
  k.Omega_sq = omega_sq_of(params, C);
  k.mu = 0.5 * k.Omega_sq;
  k.a1 = numerics::airy_first_zero();
  k.v = std::cbrt(2.0) * params.R / std::cbrt(k.Omega_sq);
  k.u = std::abs(k.a1) * k.v;
  k.C1_sq = std::cbrt(k.mu) / (2.0 * kPi * airy_weight() * params.R);
  return k;
}

double linearized_gamma(const PhysicalParams& params, double C) {
  const double om2 = omega_sq_of(params, C);
  const double a1 = std::abs(numerics::airy_first_zero());
  const double scale = params.D * params.D / (params.R * params.R);
  return scale * (om2 - std::pow(2.0, 4.0 / 3.0) * a1 * std::pow(om2, 2.0 / 3.0));
}

double first_order_rhs(const PhysicalParams& params, double C) {
  const double om2 = omega_sq_of(params, C);
  return (1.0 - first_order_coefficient() / std::cbrt(om2)) * leading_constant(params);
}

double first_order_quadrature(const PhysicalParams& params, double C) {
  const auto k = constants_for(params, C);
  const double R = params.R;
  const double scale = std::cbrt(k.mu) / R;
  auto ai_sq = [&](double r) {
    const double ai = numerics::airy_ai(scale * r + k.a1);
    return ai * ai;
  };
  const numerics::Quadrature q{.abs_tol = 1e-30, .rel_tol = 1e-13};
  const double zeroth = numerics::integrate(ai_sq, 0.0, numerics::kInfinity, q, 1.0 / scale);
  const double first = numerics::integrate([&](double r) { return r * ai_sq(r); }, 0.0, numerics::kInfinity, q,
                                           1.0 / scale);
  return k.C1_sq / (R * R) * zeroth - 2.0 * k.C1_sq / (R * R * R) * first;
}

double self_consistent_constant(const PhysicalParams& params, double tol) {
  // Solve for x = 2 pi C R^2, so that Omega_sq = 1 + (V R / (D x))^2.
  const double k = first_order_coefficient();
  const double vr_d = params.V * params.R / params.D;
  auto residual = [&](double x) {
    if (x <= 0.0) return vr_d > 0.0 ? -1.0 : k - 1.0;
    const double ratio = vr_d / x;
    return x - 1.0 + k / std::cbrt(1.0 + ratio * ratio);
  };
  double x = 0.0;
  try {
    x = numerics::find_root(residual, 0.0, 2.0, tol);
  } catch (const BracketError&) {
    throw RegimeError("first-order self-consistency relation has no positive root (V R / D = " +
                      format_double(vr_d) + ")");
  }
  if (!(x > 0.0)) throw RegimeError("first-order self-consistency root is not positive");
  return x * leading_constant(params);
}

ConstantReport constant_report(const PhysicalParams& params) {
  ConstantReport r;
  const double a1 = std::abs(numerics::airy_first_zero());
  const double R = params.R, V = params.V, D = params.D;
  r.leading = leading_constant(params);
  r.first_order_root = self_consistent_constant(params);
  r.large_R_expansion = r.leading * (1.0 - first_order_coefficient() * std::pow(D / (V * R), 2.0 / 3.0));
  r.closed_form = r.leading - std::pow(2.0, 4.0 / 3.0) / (3.0 * kPi) * a1 * D * D / (V * V * std::pow(R, 4));
  r.closed_form_deviation = (r.closed_form - r.first_order_root) / r.first_order_root;
  const double mu_cube_root = std::cbrt(mu_of(params, r.first_order_root));
  r.printed_factor = 4.0 * a1 / (3.0 * kPi * mu_cube_root);
  r.rederived_factor = 4.0 * a1 / (3.0 * mu_cube_root);
  r.factor_ratio = r.rederived_factor / r.printed_factor;
  return r;
}

nlohmann::json to_json(const ConstantReport& r) {
  return {{"C_leading", r.leading},
          {"C_first_order_root", r.first_order_root},
          {"C_large_R_expansion", r.large_R_expansion},
          {"C_closed_form", r.closed_form},
          {"closed_form_relative_deviation", r.closed_form_deviation},
          {"correction_factor_printed", r.printed_factor},
          {"correction_factor_rederived", r.rederived_factor},
          {"correction_factor_ratio", r.factor_ratio},
          {"status", "informational"}};
}

double density_value(const PhysicalParams& params, double C, double rho) {
  if (rho < params.R) return 0.0;
  const double scale = std::cbrt(mu_of(params, C));
  const double a1 = numerics::airy_first_zero();
  const double ai = numerics::airy_ai(scale * (rho - params.R) / params.R + a1);
  return scale / (2.0 * kPi * airy_weight() * params.R * rho) * ai * ai;
}

double closed_form_density(const PhysicalParams& params, double rho) {
  if (rho < params.R) return 0.0;
  const double R = params.R, V = params.V, D = params.D;
  const double a1 = numerics::airy_first_zero();
  const double prefactor = std::pow(V, 2.0 / 3.0) /
                           (std::pow(2.0, 4.0 / 3.0) * kPi * airy_weight() * std::pow(D, 2.0 / 3.0) *
                            std::cbrt(R) * rho);
  const double ai = numerics::airy_ai(std::cbrt(V * V / (2.0 * D * D)) * (rho - R) / std::cbrt(R) + a1);
  return prefactor * ai * ai;
}

RadialDensity asymptotic_density(const PhysicalParams& params, double C, const RadialGrid& grid) {
  if (std::abs(grid.R() - params.R) > 1e-12 * params.R) {
    throw InputError("grid must start at the disc radius");
  }
  std::vector<double> values(grid.size());
  values[0] = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) values[i] = density_value(params, C, grid[i]);
  return RadialDensity(grid, std::move(values));
}

RadialDensity asymptotic_density(const PhysicalParams& params, double C) {
  return asymptotic_density(params, C, RadialGrid::for_params(params));
}

double mode_offset(const PhysicalParams& params, double C) {
  const double shift = numerics::airy_prime_first_zero() - numerics::airy_first_zero();
  return shift * params.R / std::cbrt(mu_of(params, C));
}

double interquartile_width(const RadialDensity& density) {
  return density.quantile(0.75) - density.quantile(0.25);
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("log-log fit needs matching samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InputError("log-log fit needs positive samples");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double strip_width_exponent(const PhysicalParams& base, std::span<const double> radii) {
  if (radii.size() < 4) throw InputError("strip width exponent needs at least 4 radii");
  const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0) throw InputError("radii must be positive and span two decades");
  std::vector<double> widths;
  widths.reserve(radii.size());
  for (double R : radii) {
    const PhysicalParams p(R, base.V, base.D);
    widths.push_back(interquartile_width(asymptotic_density(p, leading_constant(p))));
  }
  return log_log_slope(radii, widths);
}

}  // namespace discwalk::asymptotic
