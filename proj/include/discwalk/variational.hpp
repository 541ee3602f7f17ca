#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "discwalk/bvp.hpp"
#include "discwalk/model.hpp"

// Action functionals of the tilted radial process and a numerical check that
// the boundary-value solution minimizes them.
namespace discwalk::variational {

struct ActionBreakdown {
  double radial_term = 0.0;   // 8 pi D^2 * integral of Q'^2 rho
  double angular_term = 0.0;  // V^2 / (2 pi R^2 C)
  std::optional<double> lagrange_term;  // 2 pi gamma * integral of Q^2 rho
  double total = 0.0;
  double error = 0.0;  // quadrature error bound on total
};

nlohmann::json to_json(const ActionBreakdown& a);

/// 2 pi * integral of (v_rho^2 + v_phi^2) P rho. Points where P = 0 contribute
/// nothing, so the wall singularity of v_rho is harmless.
QuadratureValue action_of_velocity(const RadialDensity& P, const DriftField& field);

/// Action as a functional of the density, radial part in Q-form.
/// Throws DensityError if P vanishes at an interior node or C = 0.
ActionBreakdown action_of_density(const RadialDensity& P, const PhysicalParams& params);
ActionBreakdown action_of_density(const RadialDensity& P, const PhysicalParams& params, double gamma);

/// Action of the finite-difference discretization used by the solver, for an
/// amplitude vector Q on `grid` (Q[0] = 0), with the Robin tail rate `tail_rate`.
/// Mass is 2 pi * sum w_i rho_i Q_i^2 with trapezoid weights; the vector is
/// rescaled to unit mass before evaluation.
struct DiscreteAction {
  double radial = 0.0;
  double angular = 0.0;
  double total = 0.0;
  double scale = 0.0;  // sum of magnitudes of the cancelling parts, for noise floors
};

DiscreteAction discrete_action(const PhysicalParams& params, const RadialGrid& grid, std::span<const double> Q,
                               double tail_rate);

struct MinimalityEntry {
  int perturbation_id = 0;
  double epsilon = 0.0;
  double delta_action = 0.0;
};

struct PerturbationSummary {
  int perturbation_id = 0;
  double center = 0.0;  // bump center; 0 for the excited-mode direction
  double width = 0.0;
  double first_variation = 0.0;
  double second_variation = 0.0;
  double fit_curvature = 0.0;  // b in the least-squares fit delta = a eps + b eps^2
  double stationarity_ratio = 0.0;
  bool passed = false;
};

struct MinimalityReport {
  std::vector<MinimalityEntry> entries;
  std::vector<PerturbationSummary> perturbations;
  double noise_floor = 0.0;
  double C = 0.0;                // discretely re-closed winding constant
  double C_shift = 0.0;          // relative difference to the solver's C
  double max_stationarity_ratio = 0.0;
  double min_delta_action = 0.0;
  bool passed = false;
};

inline constexpr double kEpsilons[] = {1e-2, -1e-2, 1e-3, -1e-3};

/// Evaluates the discrete action along random cubic B-spline bumps (support
/// inside the strip, away from the wall) and along the first excited mode.
/// Each bump is orthogonalized against Q in the mass inner product and scaled
/// to the norm of Q; perturbed amplitudes are renormalized exactly.
/// Perturbation i draws from a stream seeded by (seed, i).
/// `n_perturbations` counts the random bumps and must be at least 10.
MinimalityReport verify_minimality(const bvp::SelfConsistentSolution& solution, int n_perturbations,
                                   std::uint64_t seed);

/// List of {perturbation_id, epsilon, delta_action}.
nlohmann::json entries_to_json(const MinimalityReport& r);
/// Entries plus per-perturbation diagnostics and the verdict.
nlohmann::json to_json(const MinimalityReport& r);

}  // namespace discwalk::variational
