#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "discwalk/asymptotic.hpp"
#include "discwalk/errors.hpp"
#include "discwalk/montecarlo.hpp"

using namespace discwalk;
using namespace discwalk::montecarlo;

namespace {

DriftField constant_field(double vr, double vphi) {
  return {[vr](double) { return vr; }, [vphi](double) { return vphi; }, 0.0, 1e9};
}

struct Setup {
  PhysicalParams params;
  RadialDensity P;
};

Setup small_setup(double R = 20.0) {
  const PhysicalParams p(R, 1.0, 1.0);
  return {p, asymptotic::asymptotic_density(p, asymptotic::leading_constant(p)).normalized()};
}

SimConfig small_config() {
  SimConfig c;
  c.n_paths = 400;
  c.n_steps = 1500;
  c.burn_in = 500;
  c.histogram_bins = 100;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("single step") {
  const PhysicalParams p(1.0, 1.0, 0.5);
  const std::array<double, 2> none{0.0, 0.0}, kick{1.0, 0.0};
  StepOptions free;
  free.boundary = Boundary::free;
  const double dt = 1e-2;

  auto q = step({3.0, 0.0}, constant_field(0.0, 0.0), p, dt, none, free);
  CHECK(q.x == 3.0);
  CHECK(q.y == 0.0);
  q = step({3.0, 0.0}, constant_field(0.0, 0.0), p, dt, kick, free);
  CHECK(q.x == doctest::Approx(3.0 + std::sqrt(2 * 0.5 * dt)).epsilon(1e-15));

  // Radial drift along e_rho, tangential along e_phi (counter-clockwise).
  q = step({0.0, 2.0}, constant_field(0.7, 0.0), p, dt, none, free);
  CHECK(q.y == doctest::Approx(2.0 + 0.7 * dt).epsilon(1e-15));
  CHECK(std::abs(q.x) < 1e-15);
  q = step({2.0, 0.0}, constant_field(0.0, 0.3), p, dt, none, free);
  CHECK(q.y == doctest::Approx(0.3 * dt).epsilon(1e-15));
  CHECK(q.x == 2.0);

  StepOptions capped = free;
  capped.drift_cap = 5.0;
  q = step({2.0, 0.0}, constant_field(1e6, 0.0), p, dt, none, capped);
  CHECK(q.x == doctest::Approx(2.0 + 5.0 * dt).epsilon(1e-15));
  q = step({2.0, 0.0}, constant_field(-1e6, 0.0), p, dt, none, capped);
  CHECK(q.x == doctest::Approx(2.0 - 5.0 * dt).epsilon(1e-15));
}

TEST_CASE("reflection at the disc") {
  const PhysicalParams p(1.0, 1.0, 1.0);
  const std::array<double, 2> inward{-1.0, 0.0};
  const double dt = 1e-2;
  const auto q = step({1.01, 0.0}, constant_field(0.0, 0.0), p, dt, inward);
  const double landed = 1.01 - std::sqrt(2 * dt);
  CHECK(radius(q) == doctest::Approx(2.0 - landed).epsilon(1e-14));
  CHECK(q.y == 0.0);
  CHECK(radius(q) >= p.R);
}

TEST_CASE("free diffusion has variance 2 D t per axis") {
  const PhysicalParams p(1.0, 0.0, 0.8);
  StepOptions free;
  free.boundary = Boundary::free;
  const DriftField zero = constant_field(0.0, 0.0);
  const int paths = 4000, steps = 100;
  const double dt = 1e-2;
  std::normal_distribution<double> normal;
  double sum_sq = 0.0;
  for (int i = 0; i < paths; ++i) {
    PathStream rng(9, static_cast<std::uint64_t>(i));
    Point x{0.0, 0.0};
    for (int k = 0; k < steps; ++k) {
      const std::array<double, 2> n{normal(rng), normal(rng)};
      x = step(x, zero, p, dt, n, free);
    }
    sum_sq += x.x * x.x;
  }
  const double expected = 2 * p.D * steps * dt;
  const double se = std::sqrt(2.0 / paths) * expected;
  CHECK(std::abs(sum_sq / paths - expected) <= 3.0 * se);
}

TEST_CASE("tangential drift advances the angle") {
  const PhysicalParams p(1.0, 1.0, 1.0);
  StepOptions free;
  free.boundary = Boundary::free;
  const std::array<double, 2> none{0.0, 0.0};
  Point x{5.0, 0.0};
  const double dt = 1e-4;
  for (int k = 0; k < 1000; ++k) x = step(x, constant_field(0.0, 2.0), p, dt, none, free);
  CHECK(std::atan2(x.y, x.x) == doctest::Approx(2.0 * 1000 * dt / 5.0).epsilon(1e-4));
}

TEST_CASE("simulation stays outside the disc and counts every sample") {
  const auto s = small_setup();
  const auto c = small_config();
  const auto stats = simulate(s.params, s.P, c);
  CHECK(stats.min_radius >= s.params.R);
  CHECK(stats.total_count() == static_cast<std::uint64_t>(c.n_paths * (c.n_steps - c.burn_in)));
  CHECK(stats.n_effective == stats.total_count());
  CHECK(stats.n_paths == static_cast<std::uint64_t>(c.n_paths));
  CHECK(stats.elapsed_time == doctest::Approx((c.n_steps - c.burn_in) * c.dt).epsilon(1e-14));
  std::uint64_t halves = 0;
  for (std::size_t i = 0; i < stats.first_half.size(); ++i) halves += stats.first_half[i] + stats.second_half[i];
  CHECK(halves == stats.total_count());
  CHECK(stats.bin_lo == s.params.R);
  CHECK(stats.bin_hi == s.P.R_max());
}

TEST_CASE("results depend on the seed only") {
  const auto s = small_setup();
  auto c = small_config();
  c.threads = 1;
  const auto a = simulate(s.params, s.P, c);
  c.threads = 4;
  const auto b = simulate(s.params, s.P, c);
  CHECK(a.radial_histogram == b.radial_histogram);
  CHECK(a.total_angle == b.total_angle);
  c.seed = 4;
  const auto d = simulate(s.params, s.P, c);
  CHECK(d.radial_histogram != a.radial_histogram);
  CHECK(stats_to_csv(a) == stats_to_csv(b));
}

TEST_CASE("winding rate matches V / R and the law is stationary") {
  const auto s = small_setup();
  auto c = small_config();
  c.n_paths = 2000;
  c.n_steps = 2500;
  const auto stats = simulate(s.params, s.P, c);
  CHECK(std::abs(stats.mean_winding_rate - s.params.angular_rate()) <= 4.0 * stats.winding_rate_stderr);
  CHECK(stats.winding_rate_stderr > 0.0);
  CHECK(histogram_ks(stats.first_half, stats.second_half) < 0.03);
  const auto r = compare_distribution(stats, s.P);
  CHECK(r.ks < 0.03);
  CHECK(r.samples == stats.total_count());
}

TEST_CASE("doubling V doubles the winding rate") {
  const PhysicalParams p1(20.0, 1.0, 1.0), p2(20.0, 2.0, 1.0);
  auto c = small_config();
  c.n_paths = 1000;
  c.dt = 5e-4;
  c.n_steps = 3000;
  c.burn_in = 1000;
  auto target = [](const PhysicalParams& p) {
    return asymptotic::asymptotic_density(p, asymptotic::leading_constant(p)).normalized();
  };
  const auto a = simulate(p1, target(p1), c), b = simulate(p2, target(p2), c);
  const double se = std::hypot(2.0 * a.winding_rate_stderr, b.winding_rate_stderr);
  CHECK(std::abs(b.mean_winding_rate - 2.0 * a.mean_winding_rate) <= 4.0 * se);
}

TEST_CASE("configuration validation") {
  const auto s = small_setup();
  auto bad = [&](auto edit) {
    auto c = small_config();
    edit(c);
    CHECK_THROWS_AS(c.resolved(s.params, s.P), ConfigError);
  };
  bad([](SimConfig& c) { c.dt = 0.0; });
  bad([](SimConfig& c) { c.dt = -1.0; });
  bad([](SimConfig& c) { c.n_paths = 0; });
  bad([](SimConfig& c) { c.n_steps = 0; });
  bad([](SimConfig& c) { c.burn_in = c.n_steps; });
  bad([](SimConfig& c) { c.histogram_bins = 0; });
  bad([](SimConfig& c) { c.drift_cap = -1.0; });
  bad([](SimConfig& c) { c.dt = 0.5; });
  bad([](SimConfig& c) { c.start_radius = 10.0; });
  bad([](SimConfig& c) { c.threads = -1; });
  const auto ok = small_config().resolved(s.params, s.P);
  CHECK(ok.drift_cap == doctest::Approx(10.0 * s.params.D / strip_width(s.params)));
  CHECK(ok.bin_hi > ok.bin_lo);
  CHECK(to_json(ok).at("dt").get<double>() == ok.dt);
}

TEST_CASE("distribution comparison on exact samples") {
  const auto s = small_setup(100.0);
  const auto radii = sample_radii(s.P, 100000, 5);
  CHECK(*std::min_element(radii.begin(), radii.end()) >= s.P.R());
  const auto stats = histogram_of(radii, s.P.R(), s.P.R_max(), 400);
  const auto r = compare_distribution(stats, s.P);
  CHECK(r.ks < 0.01);
  CHECK(r.passed);
  CHECK(r.chi_square_bins > 10);
  const double iqr = histogram_quantile(stats, 0.75) - histogram_quantile(stats, 0.25);
  CHECK(iqr == doctest::Approx(asymptotic::interquartile_width(s.P)).epsilon(0.02));

  std::vector<double> shifted(radii);
  for (double& x : shifted) x += 2.0 * strip_width(s.params);
  const auto far = compare_distribution(histogram_of(shifted, s.P.R(), s.P.R_max(), 400), s.P);
  CHECK(far.ks > 0.3);
  CHECK(!far.passed);

  auto empty = stats;
  std::fill(empty.radial_histogram.begin(), empty.radial_histogram.end(), 0);
  CHECK_THROWS_AS(compare_distribution(empty, s.P), InputError);
}

TEST_CASE("histogram helpers") {
  const std::vector<std::uint64_t> a{1, 2, 3, 4}, b{1, 2, 3, 4}, c{4, 3, 2, 1};
  CHECK(histogram_ks(a, b) == 0.0);
  CHECK(histogram_ks(a, c) == doctest::Approx(0.4));
  const std::vector<double> radii{-5.0, 0.5, 1.5, 99.0};
  const auto h = histogram_of(radii, 0.0, 2.0, 2);
  CHECK(h.radial_histogram == std::vector<std::uint64_t>{2, 2});
  CHECK(histogram_quantile(h, 0.5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(histogram_of(radii, 1.0, 1.0, 2), InputError);
}

TEST_CASE("path streams are independent") {
  PathStream a(1, 0), b(1, 1), c(2, 0), a2(1, 0);
  const auto x = a();
  CHECK(x != b());
  CHECK(x != c());
  CHECK(x == a2());
}

TEST_CASE("output formats") {
  const auto s = small_setup();
  const auto stats = simulate(s.params, s.P, small_config());
  const auto csv = stats_to_csv(stats, "hello");
  CHECK(csv.rfind("# hello\n", 0) == 0);
  CHECK(csv.find("bin_lo,bin_hi,count\n") != std::string::npos);
  const auto j = stats_to_json(stats, s.params);
  CHECK(j.contains("config"));
  CHECK(j.at("n_effective").get<std::uint64_t>() == stats.n_effective);
}

TEST_CASE("refining dt and the drift cap leaves the law unchanged") {
  const auto s = small_setup();
  auto base = small_config();
  base.n_paths = 2000;
  base.n_steps = 1500;
  base.burn_in = 500;
  const auto resolved = base.resolved(s.params, s.P);

  auto half_dt = base;
  half_dt.dt = base.dt / 2;
  half_dt.n_steps = 2 * base.n_steps;
  half_dt.burn_in = 2 * base.burn_in;
  auto double_cap = base;
  double_cap.drift_cap = 2.0 * resolved.drift_cap;

  const auto a = simulate(s.params, s.P, base);
  const auto b = simulate(s.params, s.P, half_dt);
  const auto c = simulate(s.params, s.P, double_cap);
  const double ka = compare_distribution(a, s.P).ks;
  const double kb = compare_distribution(b, s.P).ks;
  const double kc = compare_distribution(c, s.P).ks;
  CHECK(ka < 0.02);
  CHECK(kb < 0.02);
  CHECK(kc < 0.02);
  CHECK(histogram_ks(a.radial_histogram, b.radial_histogram) < 0.02);
  CHECK(histogram_ks(a.radial_histogram, c.radial_histogram) < 0.02);
}
