#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "discwalk/model.hpp"

// Radial Euler-Lagrange problem
//   Q'' + Q'/rho + (1/4D^2) (V^2 / (4 pi^2 C^2 R^2 rho^2) - gamma) Q = 0,
//   Q(R) = 0, Q -> 0 at infinity,
// solved without the Airy linearization, and its self-consistent closure in C.
namespace discwalk::bvp {

/// Eigenpair of the radial problem at fixed C.
struct EigenSolution {
  double gamma = 0.0;
  RadialGrid grid;
  std::vector<double> Q;      // amplitude at grid nodes, Q[0] = 0
  double residual_norm = 0.0; // scaled max-norm of the three-point ODE residual
  int node_count = 0;         // interior sign changes of Q
  int mode = 0;               // 0 for the ground state
  double gamma_error = 0.0;   // Richardson estimate from a grid with every other node
  double tail_rate = 0.0;     // Robin rate sqrt(gamma) / (2D) at R_max

  RadialDensity density() const;
};

struct SolverOptions {
  double theta = 0.5;                            // damping of the C update
  std::size_t nodes = RadialGrid::kDefaultNodes; // uniform grid size
  double C_init = 0.0;                           // 0 selects 1 / (2 pi R^2)
};

struct SelfConsistentSolution {
  PhysicalParams params;
  double C = 0.0;
  EigenSolution eigen;
  RadialDensity P;
  int iterations = 0;
  std::vector<double> C_history;
};

/// Uniform grid on [R, R + max(40 D / sqrt(gamma_est), 15 R / mu_est^{1/3})]
/// with gamma_est, mu_est taken from the linearized problem at this C.
RadialGrid default_grid(const PhysicalParams& params, double C, std::size_t nodes = RadialGrid::kDefaultNodes);

/// Ground state (node-free, largest gamma). Throws NoBoundStateError if V = 0
/// or no eigenvalue lies below the continuum.
EigenSolution solve_eigenproblem(const PhysicalParams& params, double C, const RadialGrid& grid);

/// Mode `mode` counted from the ground state; gamma decreases with the mode.
EigenSolution solve_mode(const PhysicalParams& params, double C, const RadialGrid& grid, int mode);

/// Damped iteration C <- (1 - theta) C + theta * integral(Q^2 / rho). Stops
/// when |C - integral(Q^2/rho)| <= tol * C for the Q solved at C.
/// Throws NonConvergenceError carrying the history after max_iter rounds.
SelfConsistentSolution self_consistent_solve(const PhysicalParams& params, double tol, int max_iter,
                                             const SolverOptions& options = {});

struct ResidualReport {
  double stationary = 0.0;  // D (rho P')' - (rho v_rho P)', relative max-norm
  double flux = 0.0;        // D P' - v_rho P, relative max-norm
};

/// Residual of the stationary radial Fokker-Planck equation at interior nodes.
ResidualReport residual_of(const RadialDensity& P, const DriftField& field, const PhysicalParams& params);

/// Distance between the rescaled amplitude Q(R + x R / mu^{1/3}) sqrt(R) / C1 and
/// Ai(x + a1). `mu_leading` uses mu from C = 1/(2 pi R^2) (the closed-form
/// profile); `mu_solved` uses the converged C.
struct AiryComparison {
  double sup_error = 0.0;
  double l1_error = 0.0;
  double sup_error_solved_mu = 0.0;
  double gamma = 0.0;
  double gamma_linearized = 0.0;
  double gamma_relative_gap = 0.0;
  double C = 0.0;
  double C_first_order = 0.0;
};

AiryComparison compare_with_airy(const SelfConsistentSolution& solution);

nlohmann::json to_json(const SelfConsistentSolution& s);
nlohmann::json to_json(const AiryComparison& c);

}  // namespace discwalk::bvp
