#include "discwalk/verify.hpp"

#include <algorithm>
#include <cmath>

#include "discwalk/asymptotic.hpp"
#include "discwalk/bvp.hpp"
#include "discwalk/errors.hpp"
#include "discwalk/numerics.hpp"
#include "discwalk/variational.hpp"

namespace discwalk::verify {

namespace {


Check make(std::string name, double value, double tolerance, nlohmann::json detail = nlohmann::json::object()) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tolerance;
  c.passed = std::isfinite(value) && value <= tolerance;
  c.detail = std::move(detail);
  return c;
}

Check informational(std::string name, double value, nlohmann::json detail) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.informational = true;
  c.passed = true;
  c.detail = std::move(detail);
  return c;
}

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

Report run(const Options& options) {
  Report report;
  auto& checks = report.checks;
  const double s = options.airy_scale;
  auto ai = [s](double x) { return s * numerics::airy_ai(x); };

  const double a1 = numerics::airy_first_zero();
  const double slope = numerics::airy_ai_prime(a1);
  checks.push_back(make("airy_first_zero", std::abs(a1 + 2.33811), 1e-5,
                        {{"a1", a1}, {"Ai(a1)", ai(a1)}}));

  const numerics::Quadrature q{.abs_tol = 1e-30, .rel_tol = 1e-13};
  const double sq = numerics::integrate([&](double x) { return ai(x + a1) * ai(x + a1); }, 0.0,
                                        numerics::kInfinity, q);
  checks.push_back(make("airy_square_integral", relative(sq, slope * slope), 1e-10,
                        {{"integral", sq}, {"expected", slope * slope}}));
  const double moment = numerics::integrate([&](double x) { return x * ai(x + a1) * ai(x + a1); }, 0.0,
                                            numerics::kInfinity, q);
  const double moment_exact = 2.0 / 3.0 * std::abs(a1) * slope * slope;
  checks.push_back(make("airy_moment_integral", relative(moment, moment_exact), 1e-10,
                        {{"integral", moment}, {"expected", moment_exact}}));

  double worst = 0.0;
  const double h = 1e-3;
  for (double x = -10.0; x <= 10.0; x += 0.5) {
    const double second = (numerics::airy_ai_prime(x - 2 * h) - 8.0 * numerics::airy_ai_prime(x - h) +
                           8.0 * numerics::airy_ai_prime(x + h) - numerics::airy_ai_prime(x + 2 * h)) /
                          (12.0 * h);
    worst = std::max(worst, std::abs(second - x * ai(x)));
  }
  checks.push_back(make("airy_equation", worst, 1e-8));

  {
    double deviation = 0.0, bound = 1.0;
    nlohmann::json detail = nlohmann::json::array();
    for (double R : {1e2, 1e3, 1e4}) {
      const PhysicalParams p(R, 1.0, 1.0);
      const auto P = asymptotic::asymptotic_density(p, asymptotic::leading_constant(p));
      const double err = std::abs(P.normalization() - 1.0);
      const double tol = 5.0 * std::pow(R, -2.0 / 3.0);
      deviation = std::max(deviation, err / tol);
      detail.push_back(nlohmann::json{{"R", R}, {"mass", P.normalization()}, {"tolerance", tol}});
    }
    checks.push_back(make("asymptotic_normalization", deviation, bound, detail));
  }

  const auto& params = options.params;
  {
    const auto P = asymptotic::asymptotic_density(params, asymptotic::leading_constant(params)).normalized();
    const auto field = drift_field(P, params);
    const double rate = mean_angular_velocity(P, field.tangential);
    checks.push_back(make("constraint_closure", relative(rate, params.angular_rate()), 1e-8,
                          {{"mean_angular_velocity", rate},
                           {"V_over_R", params.angular_rate()},
                           {"turns_per_time", params.turn_rate()}}));
  }

  const double tol = 1e-10;
  const auto solution = bvp::self_consistent_solve(params, tol, 200);
  const auto& eigen = solution.eigen;
  {
    const double qmax = *std::max_element(eigen.Q.begin(), eigen.Q.end());
    const double closure = relative(winding_constant(solution.P), solution.C);
    checks.push_back(make("ground_state_nodes", eigen.node_count, 0.0, {{"gamma", eigen.gamma}}));
    checks.push_back(make("ground_state_tail", std::abs(eigen.Q.back()) / qmax, 1e-10));
    checks.push_back(make("normalization", std::abs(solution.P.normalization() - 1.0), tol));
    checks.push_back(make("self_consistency_closure", closure, tol,
                          {{"C", solution.C}, {"iterations", solution.iterations}}));
  }
  {
    const auto field = drift_field(solution.P, params);
    const auto r = bvp::residual_of(solution.P, field, params);
    const auto& grid = eigen.grid;
    const double spacing = (grid.R_max() - grid.R()) / static_cast<double>(grid.size() - 1);
    const double h2 = std::pow(spacing / strip_width(params), 2);
    checks.push_back(make("stationary_residual", r.stationary, h2, {{"ode_residual", eigen.residual_norm}}));
    checks.push_back(make("zero_flux", r.flux, 1e-10));
    checks.push_back(make("ode_residual", eigen.residual_norm, h2));

    const auto by_velocity = variational::action_of_velocity(solution.P, field);
    const auto by_density = variational::action_of_density(solution.P, params);
    checks.push_back(make("action_consistency", relative(by_velocity.value, by_density.total), 1e-6,
                          {{"action_of_velocity", by_velocity.value}, {"action_of_density", to_json(by_density)}}));
    const auto asym = variational::action_of_density(
        asymptotic::asymptotic_density(params, asymptotic::leading_constant(params), grid).normalized(), params);
    checks.push_back(make("variational_agreement", by_density.total - asym.total, by_density.error + asym.error,
                          {{"solved", by_density.total}, {"asymptotic", asym.total}}));
  }
  {
    const auto m = variational::verify_minimality(solution, options.n_perturbations, options.seed);
    Check c = make("minimality", m.max_stationarity_ratio, 1e-4,
                   {{"min_delta_action", m.min_delta_action}, {"noise_floor", m.noise_floor}});
    c.passed = c.passed && m.passed;
    checks.push_back(std::move(c));
  }
  {
    const auto cmp = bvp::compare_with_airy(solution);
    checks.push_back(informational("airy_profile_distance", cmp.sup_error, to_json(cmp)));
    checks.push_back(informational("first_order_constant_gap", relative(solution.C, cmp.C_first_order),
                                   {{"C_solved", solution.C}, {"C_first_order", cmp.C_first_order}}));
  }
  {
    const double root = asymptotic::self_consistent_constant(params);
    const double by_quadrature = asymptotic::first_order_quadrature(params, root);
    const double rhs = asymptotic::first_order_rhs(params, root);
    checks.push_back(informational("first_order_rhs_by_quadrature", relative(by_quadrature, rhs),
                                   {{"quadrature", by_quadrature}, {"closed_form", rhs}}));
    const auto report_c = asymptotic::constant_report(params);
    checks.push_back(informational("first_order_closed_forms", report_c.factor_ratio, to_json(report_c)));
  }

  report.passed = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.informational || c.passed; });
  return report;
}

nlohmann::json to_json(const Report& r) {
  auto list = nlohmann::json::array();
  for (const auto& c : r.checks) {
    nlohmann::json j{{"name", c.name}, {"value", c.value}, {"detail", c.detail}};
    if (c.informational) {
      j["status"] = "informational";
    } else {
      j["status"] = c.passed ? "pass" : "fail";
      j["tolerance"] = c.tolerance;
    }
    list.push_back(std::move(j));
  }
  return {{"checks", list}, {"passed", r.passed}};
}

}  // namespace discwalk::verify
