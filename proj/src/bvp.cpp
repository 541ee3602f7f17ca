#include "discwalk/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "discwalk/asymptotic.hpp"
#include "discwalk/errors.hpp"
#include "discwalk/numerics.hpp"

namespace discwalk::bvp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Symmetric tridiagonal matrix for the unknowns U_1 .. U_N.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;
};

struct Discretization {
  Tridiagonal matrix;
  std::vector<double> weights;  // lumped mass at nodes 1 .. N
};

// Q = U / sqrt(rho) turns the problem into -U'' - (Omega^2 / 4 rho^2) U = lambda U
// with lambda = -gamma / (4 D^2). Stiffness from sum (U_{i+1} - U_i)^2 / h_i plus
// the Robin term kappa U_N^2, lumped trapezoid mass, symmetrized by M^{-1/2}.
Discretization discretize(const PhysicalParams& params, double C, const RadialGrid& grid, double kappa) {
  const double omega_sq = asymptotic::omega_sq_of(params, C);
  const std::size_t N = grid.size() - 1;
  std::vector<double> h(N);
  for (std::size_t i = 0; i < N; ++i) h[i] = grid[i + 1] - grid[i];

  Discretization d;
  d.weights.resize(N);
  for (std::size_t i = 1; i <= N; ++i) {
    d.weights[i - 1] = i < N ? 0.5 * (h[i - 1] + h[i]) : 0.5 * h[N - 1];
  }
  d.matrix.diag.resize(N);
  d.matrix.off.resize(N - 1);
  for (std::size_t i = 1; i <= N; ++i) {
    const double stiffness = i < N ? 1.0 / h[i - 1] + 1.0 / h[i] : 1.0 / h[N - 1] + kappa;
    const double w = d.weights[i - 1];
    const double rho = grid[i];
    d.matrix.diag[i - 1] = stiffness / w - 0.25 * omega_sq / (rho * rho);
    if (i < N) d.matrix.off[i - 1] = -1.0 / (h[i] * std::sqrt(w * d.weights[i]));
  }
  return d;
}

// Number of eigenvalues strictly below x (Sturm sequence of the LDL^T pivots).
int count_below(const Tridiagonal& t, double x) {
  int count = 0;
  double pivot = 1.0;
  const double tiny = kEps * kEps;
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    const double coupling = i == 0 ? 0.0 : t.off[i - 1] * t.off[i - 1] / pivot;
    pivot = t.diag[i] - x - coupling;
    if (std::abs(pivot) < tiny) pivot = -tiny;
    if (pivot < 0.0) ++count;
  }
  return count;
}

// k-th smallest eigenvalue by bisection.
double eigenvalue(const Tridiagonal& t, int k) {
  double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    const double r = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) + (i + 1 < t.diag.size() ? std::abs(t.off[i]) : 0.0);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(t, mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

// Solves (T - shift I) x = b in place with partial pivoting.
void shifted_solve(const Tridiagonal& t, double shift, std::vector<double>& b) {
  const std::size_t n = t.diag.size();
  std::vector<double> d(n), dl(t.off), du(t.off), du2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
  double scale = 0.0;
  for (double v : d) scale = std::max(scale, std::abs(v));
  for (double v : t.off) scale = std::max(scale, std::abs(v));
  const double floor = kEps * scale;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (std::abs(d[i]) < floor) d[i] = floor;
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du2[i];
      }
      du[i] = temp;
      std::swap(b[i], b[i + 1]);
      b[i + 1] -= fact * b[i];
    }
  }
  if (std::abs(d[n - 1]) < floor) d[n - 1] = floor;
  b[n - 1] /= d[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (std::size_t i = n - 2; i-- > 0;) {
    b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
  }
}

std::vector<double> eigenvector(const Tridiagonal& t, double lambda) {
  const std::size_t n = t.diag.size();
  std::vector<double> y(n, 1.0);
  const double shift = lambda + 8.0 * kEps * std::max(1.0, std::abs(lambda));
  for (int iter = 0; iter < 4; ++iter) {
    shifted_solve(t, shift, y);
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : y) v /= norm;
  }
  return y;
}

struct RawMode {
  double gamma;
  std::vector<double> Q;  // unnormalized, Q[0] = 0
};

RawMode raw_mode(const PhysicalParams& params, double C, const RadialGrid& grid, int mode, double kappa) {
  const auto disc = discretize(params, C, grid, kappa);
  if (count_below(disc.matrix, 0.0) <= mode) {
    throw NoBoundStateError("radial problem has no bound state with index " + std::to_string(mode) +
                            " (V = " + format_double(params.V) + ", R = " + format_double(params.R) + ")");
  }
  const double lambda = eigenvalue(disc.matrix, mode);
  const auto y = eigenvector(disc.matrix, lambda);
  RawMode out;
  out.gamma = -4.0 * params.D * params.D * lambda;
  out.Q.assign(grid.size(), 0.0);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    out.Q[i] = y[i - 1] / std::sqrt(disc.weights[i - 1] * grid[i]);
    if (std::abs(out.Q[i]) > std::abs(out.Q[peak])) peak = i;
  }
  // Orient so that the mode is positive next to the wall.
  std::size_t first = 1;
  while (first < grid.size() && std::abs(out.Q[first]) < 1e-8 * std::abs(out.Q[peak])) ++first;
  if (first < grid.size() && out.Q[first] < 0.0) {
    for (double& q : out.Q) q = -q;
  }
  return out;
}

int sign_changes(const std::vector<double>& q) {
  double scale = 0.0;
  for (double v : q) scale = std::max(scale, std::abs(v));
  int changes = 0;
  int last = 0;
  for (std::size_t i = 1; i + 1 < q.size(); ++i) {
    if (std::abs(q[i]) <= 1e-10 * scale) continue;
    const int s = q[i] > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

// Derivative at interior node i from the three-point nonuniform stencil.
double centered_slope(std::span<const double> x, std::span<const double> f, std::size_t i) {
  const double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
  return (hm * hm * f[i + 1] - hp * hp * f[i - 1] + (hp * hp - hm * hm) * f[i]) / (hm * hp * (hm + hp));
}

double centered_curvature(std::span<const double> x, std::span<const double> f, std::size_t i) {
  const double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
  return 2.0 * ((f[i + 1] - f[i]) / hp - (f[i] - f[i - 1]) / hm) / (hm + hp);
}

double ode_residual(const PhysicalParams& params, double C, double gamma, const RadialGrid& grid,
                    const std::vector<double>& Q) {
  const double strength = params.V * params.V / (4.0 * kPi * kPi * C * C * params.R * params.R);
  const double inv4d2 = 0.25 / (params.D * params.D);
  double worst = 0.0, scale = 0.0;
  const auto x = grid.nodes();
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double rho = grid[i];
    const double q2 = centered_curvature(x, Q, i);
    const double q1 = centered_slope(x, Q, i) / rho;
    const double q0 = inv4d2 * (strength / (rho * rho) - gamma) * Q[i];
    worst = std::max(worst, std::abs(q2 + q1 + q0));
    scale = std::max(scale, std::abs(q2) + std::abs(q1) + std::abs(q0));
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

RadialGrid every_other_node(const RadialGrid& grid) {
  std::vector<double> nodes;
  for (std::size_t i = 0; i < grid.size(); i += 2) nodes.push_back(grid[i]);
  if (nodes.back() != grid.R_max()) nodes.push_back(grid.R_max());
  return RadialGrid(std::move(nodes));
}

}  // namespace

RadialDensity EigenSolution::density() const {
  std::vector<double> p(Q.size());
  std::transform(Q.begin(), Q.end(), p.begin(), [](double q) { return q * q; });
  return RadialDensity(grid, std::move(p));
}

RadialGrid default_grid(const PhysicalParams& params, double C, std::size_t nodes) {
  const double omega_sq = asymptotic::omega_sq_of(params, C);
  const double ceiling = params.D * params.D * omega_sq / (params.R * params.R);
  const double gamma_est = std::max(asymptotic::linearized_gamma(params, C), 1e-2 * ceiling);
  const double mu_est = asymptotic::mu_of(params, C);
  const double span = std::max(40.0 * params.D / std::sqrt(gamma_est), 15.0 * params.R / std::cbrt(mu_est));
  return RadialGrid::uniform(params.R, params.R + span, nodes);
}

EigenSolution solve_mode(const PhysicalParams& params, double C, const RadialGrid& grid, int mode) {
  if (!(params.V > 0.0)) {
    throw NoBoundStateError("no normalizable bound state for V = 0");
  }
  if (mode < 0) throw InputError("mode index must be non-negative");
  if (std::abs(grid.R() - params.R) > 1e-12 * params.R) throw InputError("grid must start at the disc radius");

  // Robin tail rate depends on gamma; a few passes settle it.
  const double ceiling = params.D * params.D * asymptotic::omega_sq_of(params, C) / (params.R * params.R);
  double gamma_guess = std::max(asymptotic::linearized_gamma(params, C), 1e-2 * ceiling);
  double kappa = std::sqrt(gamma_guess) / (2.0 * params.D);
  RawMode raw;
  double used = kappa;
  for (int pass = 0; pass < 20; ++pass) {
    used = kappa;
    raw = raw_mode(params, C, grid, mode, kappa);
    const double next = std::sqrt(std::max(raw.gamma, 0.0)) / (2.0 * params.D);
    const bool settled = std::abs(next - kappa) <= 1e-13 * kappa;
    kappa = next;
    if (settled) break;
  }

  EigenSolution sol{.gamma = raw.gamma, .grid = grid, .Q = std::move(raw.Q)};
  sol.mode = mode;
  sol.tail_rate = used;

  const double mass = sol.density().normalization();
  const double scale = 1.0 / std::sqrt(mass);
  for (double& q : sol.Q) q *= scale;
  sol.Q[0] = 0.0;

  sol.node_count = sign_changes(sol.Q);
  sol.residual_norm = ode_residual(params, C, sol.gamma, grid, sol.Q);
  if (grid.size() >= 2 * RadialGrid::kMinNodes) {
    const auto coarse = raw_mode(params, C, every_other_node(grid), mode, kappa);
    sol.gamma_error = std::abs(sol.gamma - coarse.gamma) / 3.0;
  }
  return sol;
}

EigenSolution solve_eigenproblem(const PhysicalParams& params, double C, const RadialGrid& grid) {
  return solve_mode(params, C, grid, 0);
}

SelfConsistentSolution self_consistent_solve(const PhysicalParams& params, double tol, int max_iter,
                                             const SolverOptions& options) {
  if (!(tol > 0.0 && tol <= 1e-3)) throw InputError("self-consistency tolerance must lie in (0, 1e-3]");
  if (max_iter < 1) throw InputError("max_iter must be at least 1");
  if (!(options.theta > 0.0 && options.theta <= 1.0)) throw InputError("damping theta must lie in (0, 1]");
  if (!(params.V > 0.0)) throw NoBoundStateError("no normalizable bound state for V = 0");

  double C = options.C_init > 0.0 ? options.C_init : asymptotic::leading_constant(params);
  const RadialGrid grid = default_grid(params, asymptotic::leading_constant(params), options.nodes);
  std::vector<double> history{C};

  for (int iter = 1; iter <= max_iter; ++iter) {
    auto eigen = solve_eigenproblem(params, C, grid);
    auto P = eigen.density();
    const double closure = winding_constant(P);
    if (std::abs(closure - C) <= tol * C) {
      return SelfConsistentSolution{.params = params,
                                    .C = C,
                                    .eigen = std::move(eigen),
                                    .P = std::move(P),
                                    .iterations = iter,
                                    .C_history = std::move(history)};
    }
    C = (1.0 - options.theta) * C + options.theta * closure;
    history.push_back(C);
  }
  throw NonConvergenceError("self-consistent loop did not converge in " + std::to_string(max_iter) +
                                " iterations",
                            std::move(history));
}

ResidualReport residual_of(const RadialDensity& P, const DriftField& field, const PhysicalParams& params) {
  const auto& grid = P.grid();
  const auto x = grid.nodes();
  const auto values = P.values();
  const std::size_t n = grid.size();
  std::vector<double> diffusive(n), advective(n), slope(n), velocity(n);
  for (std::size_t i = 0; i < n; ++i) {
    slope[i] = P.derivative(x[i]);
    velocity[i] = field.radial(x[i]);
    diffusive[i] = x[i] * slope[i];
    // Zero density carries no flux even where the drift is singular.
    advective[i] = values[i] > 0.0 ? x[i] * velocity[i] * values[i] : 0.0;
  }
  ResidualReport r;
  double worst = 0.0, scale = 0.0, flux_worst = 0.0, flux_scale = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = params.D * centered_slope(x, diffusive, i);
    const double b = centered_slope(x, advective, i);
    worst = std::max(worst, std::abs(a - b));
    scale = std::max({scale, std::abs(a), std::abs(b)});
    const double flux = values[i] > 0.0 ? params.D * slope[i] - velocity[i] * values[i] : params.D * slope[i];
    flux_worst = std::max(flux_worst, std::abs(flux));
    flux_scale = std::max(flux_scale, std::abs(params.D * slope[i]));
  }
  r.stationary = scale > 0.0 ? worst / scale : 0.0;
  r.flux = flux_scale > 0.0 ? flux_worst / flux_scale : 0.0;
  return r;
}

AiryComparison compare_with_airy(const SelfConsistentSolution& solution) {
  const auto& params = solution.params;
  const auto& grid = solution.eigen.grid;
  const auto& Q = solution.eigen.Q;
  const double a1 = numerics::airy_first_zero();

  auto distance = [&](double C, double& sup, double* l1) {
    const auto k = asymptotic::constants_for(params, C);
    const double scale = std::cbrt(k.mu) / params.R;
    const double norm = std::sqrt(params.R) / std::sqrt(k.C1_sq);
    sup = 0.0;
    double area = 0.0, prev_x = 0.0, prev_e = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = (grid[i] - params.R) * scale;
      const double e = std::abs(Q[i] * norm - numerics::airy_ai(x + a1));
      sup = std::max(sup, e);
      if (i > 0) area += 0.5 * (e + prev_e) * (x - prev_x);
      prev_x = x;
      prev_e = e;
    }
    if (l1) *l1 = area;
  };

  AiryComparison c;
  distance(asymptotic::leading_constant(params), c.sup_error, &c.l1_error);
  distance(solution.C, c.sup_error_solved_mu, nullptr);
  c.gamma = solution.eigen.gamma;
  c.gamma_linearized = asymptotic::linearized_gamma(params, solution.C);
  c.gamma_relative_gap = (c.gamma - c.gamma_linearized) / c.gamma_linearized;
  c.C = solution.C;
  c.C_first_order = asymptotic::self_consistent_constant(params);
  return c;
}

nlohmann::json to_json(const SelfConsistentSolution& s) {
  return {{"params", {{"R", s.params.R}, {"V", s.params.V}, {"D", s.params.D}}},
          {"gamma", s.eigen.gamma},
          {"gamma_error", s.eigen.gamma_error},
          {"C", s.C},
          {"iterations", s.iterations},
          {"residual_norm", s.eigen.residual_norm},
          {"node_count", s.eigen.node_count},
          {"C_history", s.C_history}};
}

nlohmann::json to_json(const AiryComparison& c) {
  return {{"sup_error", c.sup_error},
          {"l1_error", c.l1_error},
          {"sup_error_solved_mu", c.sup_error_solved_mu},
          {"gamma", c.gamma},
          {"gamma_linearized", c.gamma_linearized},
          {"gamma_relative_gap", c.gamma_relative_gap},
          {"C", c.C},
          {"C_first_order", c.C_first_order}};
}

}  // namespace discwalk::bvp
