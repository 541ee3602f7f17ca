#include "discwalk/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "discwalk/errors.hpp"

namespace discwalk::montecarlo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::size_t bin_of(double rho, double lo, double width, std::size_t bins) {
  const double k = std::floor((rho - lo) / width);
  if (!(k > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(k), bins - 1);
}

}  // namespace

PathStream::PathStream(std::uint64_t seed, std::uint64_t path) {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix(s);
  std::uint64_t t = path ^ 0xD1B54A32D192ED03ull;
  state_ = a ^ splitmix(t);
}

PathStream::result_type PathStream::operator()() { return splitmix(state_); }

Point step(Point position, const DriftField& field, const PhysicalParams& params, double dt,
           std::span<const double, 2> noise, const StepOptions& options) {
  const double rho = radius(position);
  double vx = 0.0, vy = 0.0;
  if (rho > 0.0) {
    double vr = field.radial ? field.radial(rho) : 0.0;
    if (std::isnan(vr)) vr = 0.0;
    vr = std::clamp(vr, -options.drift_cap, options.drift_cap);
    const double vp = field.tangential ? field.tangential(rho) : 0.0;
    const double cx = position.x / rho, cy = position.y / rho;
    vx = vr * cx - vp * cy;
    vy = vr * cy + vp * cx;
  }
  const double kick = std::sqrt(2.0 * params.D * dt);
  Point next{position.x + vx * dt + kick * noise[0], position.y + vy * dt + kick * noise[1]};
  if (options.boundary == Boundary::reflect) {
    const double r = radius(next);
    if (r < params.R) {
      if (r > 0.0) {
        const double scale = (2.0 * params.R - r) / r;
        next.x *= scale;
        next.y *= scale;
      } else {
        next = rho > 0.0 ? Point{position.x * params.R / rho, position.y * params.R / rho} : Point{params.R, 0.0};
      }
    }
  }
  return next;
}

SimConfig SimConfig::resolved(const PhysicalParams& params, const RadialDensity& target) const {
  SimConfig c = *this;
  const double strip = strip_width(params);
  if (c.drift_cap == 0.0) c.drift_cap = 10.0 * params.D / strip;
  if (!(c.bin_hi > c.bin_lo)) {
    c.bin_lo = target.R();
    c.bin_hi = target.R_max();
  }
  if (c.threads == 0) c.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ConfigError("dt must be positive");
  if (c.n_paths < 1) throw ConfigError("n_paths must be at least 1");
  if (c.n_steps < 1) throw ConfigError("n_steps must be at least 1");
  if (c.burn_in < 0 || c.burn_in >= c.n_steps) throw ConfigError("burn_in must lie in [0, n_steps)");
  if (c.histogram_bins < 1) throw ConfigError("histogram_bins must be at least 1");
  if (!(c.drift_cap > 0.0)) throw ConfigError("drift_cap must be positive");
  if (c.threads < 0) throw ConfigError("threads must be non-negative");
  if (!std::isfinite(c.bin_lo) || !std::isfinite(c.bin_hi)) throw ConfigError("bin range must be finite");
  const double width = (c.bin_hi - c.bin_lo) / c.histogram_bins;
  const double travel = c.drift_cap * c.dt;
  if (travel >= width) {
    throw ConfigError("drift_cap * dt = " + format_double(travel) + " reaches the bin width " + format_double(width));
  }
  if (travel >= strip / 10.0) {
    throw ConfigError("drift_cap * dt = " + format_double(travel) + " exceeds a tenth of the strip width " +
                      format_double(strip));
  }
  if (c.start_radius && !(*c.start_radius >= params.R)) throw ConfigError("start_radius lies inside the disc");
  return c;
}

nlohmann::json to_json(const SimConfig& c) {
  nlohmann::json j{{"dt", c.dt},
                   {"n_steps", c.n_steps},
                   {"n_paths", c.n_paths},
                   {"burn_in", c.burn_in},
                   {"seed", c.seed},
                   {"drift_cap", c.drift_cap},
                   {"histogram_bins", c.histogram_bins},
                   {"bin_lo", c.bin_lo},
                   {"bin_hi", c.bin_hi},
                   {"boundary", c.boundary == Boundary::reflect ? "reflect" : "free"}};
  if (c.start_radius) j["start_radius"] = *c.start_radius;
  return j;
}

std::uint64_t SimulationStats::total_count() const {
  std::uint64_t n = 0;
  for (auto c : radial_histogram) n += c;
  return n;
}

SimulationStats simulate(const PhysicalParams& params, const RadialDensity& target, const SimConfig& config) {
  const SimConfig c = config.resolved(params, target);
  const DriftField field = drift_field(target, params);
  const StepOptions options{c.drift_cap, c.boundary};
  const auto bins = static_cast<std::size_t>(c.histogram_bins);
  const double width = (c.bin_hi - c.bin_lo) / c.histogram_bins;
  const std::int64_t recorded = c.n_steps - c.burn_in;
  const std::int64_t half = recorded / 2;

  struct Partial {
    std::vector<std::uint64_t> all, first, second;
    double min_radius = std::numeric_limits<double>::infinity();
  };
  std::vector<double> path_angle(static_cast<std::size_t>(c.n_paths), 0.0);
  std::vector<Partial> partials(static_cast<std::size_t>(c.threads));
  std::atomic<std::int64_t> next_path{0};

  auto worker = [&](Partial& part) {
    part.all.assign(bins, 0);
    part.first.assign(bins, 0);
    part.second.assign(bins, 0);
    for (;;) {
      const std::int64_t p = next_path.fetch_add(1);
      if (p >= c.n_paths) break;
      PathStream stream(c.seed, static_cast<std::uint64_t>(p));
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      std::normal_distribution<double> normal;
      const double rho0 = c.start_radius ? *c.start_radius : target.quantile(uniform(stream));
      const double phi0 = kTwoPi * uniform(stream);
      Point pos{rho0 * std::cos(phi0), rho0 * std::sin(phi0)};
      double angle = 0.0;
      for (std::int64_t s = 1; s <= c.n_steps; ++s) {
        const double noise[2] = {normal(stream), normal(stream)};
        const Point next = step(pos, field, params, c.dt, std::span<const double, 2>(noise), options);
        if (s > c.burn_in) {
          angle += std::atan2(pos.x * next.y - pos.y * next.x, pos.x * next.x + pos.y * next.y);
          const double r = radius(next);
          const std::size_t k = bin_of(r, c.bin_lo, width, bins);
          ++part.all[k];
          ++(s - c.burn_in - 1 < half ? part.first : part.second)[k];
          part.min_radius = std::min(part.min_radius, r);
        }
        pos = next;
      }
      path_angle[static_cast<std::size_t>(p)] = angle;
    }
  };

  if (c.threads == 1) {
    worker(partials[0]);
  } else {
    std::vector<std::thread> pool;
    for (auto& part : partials) pool.emplace_back(worker, std::ref(part));
    for (auto& t : pool) t.join();
  }

  SimulationStats stats;
  stats.config = c;
  stats.dt = c.dt;
  stats.bin_lo = c.bin_lo;
  stats.bin_hi = c.bin_hi;
  stats.radial_histogram.assign(bins, 0);
  stats.first_half.assign(bins, 0);
  stats.second_half.assign(bins, 0);
  stats.min_radius = std::numeric_limits<double>::infinity();
  for (const auto& part : partials) {
    for (std::size_t k = 0; k < bins; ++k) {
      stats.radial_histogram[k] += part.all[k];
      stats.first_half[k] += part.first[k];
      stats.second_half[k] += part.second[k];
    }
    stats.min_radius = std::min(stats.min_radius, part.min_radius);
  }
  stats.n_paths = static_cast<std::uint64_t>(c.n_paths);
  stats.n_effective = stats.n_paths * static_cast<std::uint64_t>(recorded);
  stats.elapsed_time = static_cast<double>(recorded) * c.dt;
  for (double a : path_angle) stats.total_angle += a;
  stats.mean_winding_rate = stats.total_angle / (static_cast<double>(c.n_paths) * stats.elapsed_time);
  if (c.n_paths > 1) {
    double ss = 0.0;
    for (double a : path_angle) {
      const double d = a / stats.elapsed_time - stats.mean_winding_rate;
      ss += d * d;
    }
    const double n = static_cast<double>(c.n_paths);
    stats.winding_rate_stderr = std::sqrt(ss / (n - 1.0) / n);
  }
  return stats;
}

DistributionReport compare_distribution(const SimulationStats& stats, const RadialDensity& P, double threshold) {
  const std::uint64_t total = stats.total_count();
  if (total == 0) throw InputError("empty histogram");
  const std::size_t bins = stats.radial_histogram.size();
  const double width = stats.bin_width();
  const double n = static_cast<double>(total);

  DistributionReport r;
  r.threshold = threshold;
  r.samples = total;
  r.chi_square_terms.assign(bins, 0.0);
  double cum = 0.0, prev_cdf = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    cum += static_cast<double>(stats.radial_histogram[k]);
    const double edge_cdf = k + 1 == bins ? 1.0 : P.cdf(stats.bin_lo + static_cast<double>(k + 1) * width);
    r.ks = std::max(r.ks, std::abs(cum / n - edge_cdf));
    const double expected = n * (edge_cdf - prev_cdf);
    if (expected >= 5.0) {
      const double d = static_cast<double>(stats.radial_histogram[k]) - expected;
      r.chi_square_terms[k] = d * d / expected;
      r.chi_square += r.chi_square_terms[k];
      ++r.chi_square_bins;
    }
    prev_cdf = edge_cdf;
  }
  r.passed = r.ks <= threshold;
  return r;
}

nlohmann::json to_json(const DistributionReport& r) {
  return {{"ks", r.ks},
          {"chi_square", r.chi_square},
          {"chi_square_bins", r.chi_square_bins},
          {"chi_square_terms", r.chi_square_terms},
          {"threshold", r.threshold},
          {"samples", r.samples},
          {"passed", r.passed}};
}

double histogram_ks(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw InputError("histograms have different bin counts");
  double na = 0.0, nb = 0.0;
  for (auto v : a) na += static_cast<double>(v);
  for (auto v : b) nb += static_cast<double>(v);
  if (na == 0.0 || nb == 0.0) throw InputError("empty histogram");
  double ca = 0.0, cb = 0.0, ks = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ca += static_cast<double>(a[k]);
    cb += static_cast<double>(b[k]);
    ks = std::max(ks, std::abs(ca / na - cb / nb));
  }
  return ks;
}

double histogram_quantile(const SimulationStats& stats, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw InputError("quantile level must lie in [0, 1]");
  const double n = static_cast<double>(stats.total_count());
  if (n == 0.0) throw InputError("empty histogram");
  const double target = u * n;
  const double width = stats.bin_width();
  double cum = 0.0;
  for (std::size_t k = 0; k < stats.radial_histogram.size(); ++k) {
    const double count = static_cast<double>(stats.radial_histogram[k]);
    if (count > 0.0 && cum + count >= target) {
      return stats.bin_lo + (static_cast<double>(k) + (target - cum) / count) * width;
    }
    cum += count;
  }
  return stats.bin_hi;
}

std::vector<double> sample_radii(const RadialDensity& P, std::size_t n, std::uint64_t seed) {
  PathStream stream(seed, 0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> out(n);
  for (double& r : out) r = P.quantile(uniform(stream));
  return out;
}

SimulationStats histogram_of(std::span<const double> radii, double lo, double hi, int bins) {
  if (!(hi > lo) || bins < 1) throw InputError("invalid histogram range");
  SimulationStats s;
  s.bin_lo = lo;
  s.bin_hi = hi;
  const auto nb = static_cast<std::size_t>(bins);
  s.radial_histogram.assign(nb, 0);
  const double width = (hi - lo) / bins;
  s.min_radius = std::numeric_limits<double>::infinity();
  for (double r : radii) {
    ++s.radial_histogram[bin_of(r, lo, width, nb)];
    s.min_radius = std::min(s.min_radius, r);
  }
  s.n_effective = radii.size();
  return s;
}

std::string stats_to_csv(const SimulationStats& stats, std::string_view comment) {
  std::ostringstream out;
  std::istringstream lines{std::string(comment)};
  for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
  out << "bin_lo,bin_hi,count\n";
  const double width = stats.bin_width();
  for (std::size_t k = 0; k < stats.radial_histogram.size(); ++k) {
    out << format_double(stats.bin_lo + static_cast<double>(k) * width) << ','
        << format_double(k + 1 == stats.radial_histogram.size() ? stats.bin_hi
                                                                  : stats.bin_lo + static_cast<double>(k + 1) * width)
        << ',' << stats.radial_histogram[k] << '\n';
  }
  return out.str();
}

nlohmann::json stats_to_json(const SimulationStats& stats, const PhysicalParams& params) {
  return {{"ks", stats.ks_distance},
          {"winding_rate", stats.mean_winding_rate},
          {"winding_rate_stderr", stats.winding_rate_stderr},
          {"winding_rate_target", params.angular_rate()},
          {"turn_rate", stats.mean_winding_rate / kTwoPi},
          {"turn_rate_target", params.turn_rate()},
          {"n_effective", stats.n_effective},
          {"n_paths", stats.n_paths},
          {"elapsed_time", stats.elapsed_time},
          {"total_angle", stats.total_angle},
          {"min_radius", stats.min_radius},
          {"dt", stats.dt},
          {"config", to_json(stats.config)}};
}

}  // namespace discwalk::montecarlo
