#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "discwalk/model.hpp"

// Langevin simulation of the tilted diffusion outside the disc.
namespace discwalk::montecarlo {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double radius(Point p) { return std::hypot(p.x, p.y); }

enum class Boundary {
  reflect,  // rho' -> 2R - rho' at fixed angle when the step lands inside the disc
  free,     // no disc; for testing the bare diffusion
};

struct StepOptions {
  double drift_cap = std::numeric_limits<double>::infinity();
  Boundary boundary = Boundary::reflect;
};

/// One Cartesian Euler-Maruyama step x' = x + v dt + sqrt(2 D dt) * noise,
/// with v assembled from (clamped v_rho, v_phi) at the current radius.
Point step(Point position, const DriftField& field, const PhysicalParams& params, double dt,
           std::span<const double, 2> noise, const StepOptions& options = {});

struct SimConfig {
  double dt = 1e-3;
  std::int64_t n_steps = 5050;
  std::int64_t n_paths = 20000;
  std::int64_t burn_in = 5000;
  std::uint64_t seed = 1;
  double drift_cap = 0.0;  // 0 selects 10 D / strip_width
  int histogram_bins = 400;
  double bin_lo = 0.0;  // bin range; bin_hi <= bin_lo selects [R, R_max of the target]
  double bin_hi = 0.0;
  Boundary boundary = Boundary::reflect;
  std::optional<double> start_radius;  // all paths start here instead of sampling the target
  int threads = 0;                     // 0 uses the hardware concurrency

  /// Resolves defaults against the parameters and target, then checks
  /// invariants. Throws ConfigError.
  SimConfig resolved(const PhysicalParams& params, const RadialDensity& target) const;
};

nlohmann::json to_json(const SimConfig& c);

struct SimulationStats {
  double bin_lo = 0.0;
  double bin_hi = 0.0;
  std::vector<std::uint64_t> radial_histogram;
  std::vector<std::uint64_t> first_half;   // samples from the first half of each recorded window
  std::vector<std::uint64_t> second_half;
  double total_angle = 0.0;       // radians, summed over paths in path order
  double elapsed_time = 0.0;      // (n_steps - burn_in) * dt per path
  std::uint64_t n_paths = 0;
  std::uint64_t n_effective = 0;  // recorded samples
  double mean_winding_rate = 0.0; // total_angle / (n_paths * elapsed_time), radians per time
  double winding_rate_stderr = 0.0;
  double min_radius = 0.0;        // smallest recorded radius
  double ks_distance = std::numeric_limits<double>::quiet_NaN();
  double dt = 0.0;
  SimConfig config;

  double bin_width() const { return (bin_hi - bin_lo) / static_cast<double>(radial_histogram.size()); }
  std::uint64_t total_count() const;
};

/// Runs n_paths trajectories with the drift of `target`, started by inverse-CDF
/// sampling from it. Deterministic for a given seed, independent of threads.
SimulationStats simulate(const PhysicalParams& params, const RadialDensity& target, const SimConfig& config);

struct DistributionReport {
  double ks = 0.0;
  double chi_square = 0.0;
  int chi_square_bins = 0;      // bins with expected count >= 5
  std::vector<double> chi_square_terms;
  double threshold = 0.0;
  std::uint64_t samples = 0;
  bool passed = false;
};

/// KS distance between the binned empirical CDF and the area-weighted CDF of P
/// at bin edges, plus per-bin chi-square. Throws InputError on an empty histogram.
DistributionReport compare_distribution(const SimulationStats& stats, const RadialDensity& P,
                                        double threshold = 0.02);

nlohmann::json to_json(const DistributionReport& r);

/// Two-sample KS distance between histograms on the same bins.
double histogram_ks(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// Quantile of the binned sample, linear within bins.
double histogram_quantile(const SimulationStats& stats, double u);

/// Independent draws from P by inverse CDF.
std::vector<double> sample_radii(const RadialDensity& P, std::size_t n, std::uint64_t seed);

/// Histogram of raw radii (overflow into the end bins) wrapped as stats.
SimulationStats histogram_of(std::span<const double> radii, double lo, double hi, int bins);

/// Per-path random stream: SplitMix64 keyed by (seed, path).
class PathStream {
 public:
  using result_type = std::uint64_t;
  PathStream(std::uint64_t seed, std::uint64_t path);
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

 private:
  std::uint64_t state_;
};

std::string stats_to_csv(const SimulationStats& stats, std::string_view comment = {});
nlohmann::json stats_to_json(const SimulationStats& stats, const PhysicalParams& params);

}  // namespace discwalk::montecarlo
