#include "discwalk/model.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>

#include "discwalk/errors.hpp"
#include "discwalk/numerics.hpp"

namespace discwalk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<double, 5> kGl5Nodes = {0.0, -0.5384693101056831, 0.5384693101056831,
                                             -0.9061798459386640, 0.9061798459386640};
constexpr std::array<double, 5> kGl5Weights = {0.5688888888888889, 0.4786286704993665,
                                               0.4786286704993665, 0.2369268850561891,
                                               0.2369268850561891};
constexpr std::array<double, 2> kGl3Nodes = {-0.7745966692414834, 0.7745966692414834};
constexpr double kGl3Center = 8.0 / 9.0;
constexpr double kGl3Side = 5.0 / 9.0;

std::vector<double> amplitudes(std::span<const double> values) {
  std::vector<double> q(values.size());
  std::transform(values.begin(), values.end(), q.begin(), [](double p) { return std::sqrt(p); });
  return q;
}

}  // namespace

PhysicalParams::PhysicalParams(double R_, double V_, double D_) : R(R_), V(V_), D(D_) {
  if (!std::isfinite(R) || !(R > 0.0)) throw InputError("disc radius R must be positive");
  if (!std::isfinite(D) || !(D > 0.0)) throw InputError("diffusion coefficient D must be positive");
  if (!std::isfinite(V) || !(V >= 0.0)) throw InputError("tangential speed V must be non-negative");
}

double PhysicalParams::turn_rate() const { return V / (kTwoPi * R); }

double strip_width(const PhysicalParams& params) {
  const double ratio = params.V * params.R / params.D;
  return params.R / std::cbrt(0.5 * (1.0 + ratio * ratio));
}

RadialGrid::RadialGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < kMinNodes) {
    throw InputError("radial grid needs at least " + std::to_string(kMinNodes) + " nodes");
  }
  if (!std::isfinite(nodes_.front()) || !(nodes_.front() > 0.0)) {
    throw InputError("radial grid must start at a positive radius");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i]) || !(nodes_[i] > nodes_[i - 1])) {
      throw InputError("radial grid nodes must be strictly increasing");
    }
  }
}

RadialGrid RadialGrid::uniform(double R, double R_max, std::size_t count) {
  if (count < kMinNodes || !(R_max > R)) throw InputError("invalid uniform grid request");
  std::vector<double> nodes(count);
  const double h = (R_max - R) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) nodes[i] = R + h * static_cast<double>(i);
  nodes.back() = R_max;
  return RadialGrid(std::move(nodes));
}

RadialGrid RadialGrid::clustered(double R, double R_max, std::size_t count) {
  if (count < kMinNodes || !(R_max > R)) throw InputError("invalid clustered grid request");
  std::vector<double> nodes(count);
  const double span = R_max - R;
  for (std::size_t i = 0; i < count; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(count - 1);
    nodes[i] = R + span * s * (1.0 + s) / 2.0;
  }
  nodes.back() = R_max;
  return RadialGrid(std::move(nodes));
}

RadialGrid RadialGrid::for_params(const PhysicalParams& params, std::size_t count) {
  return clustered(params.R, params.R + 15.0 * strip_width(params), count);
}

RadialDensity::RadialDensity(RadialGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw InputError("density values do not match grid size");
  for (double p : values_) {
    if (!std::isfinite(p) || p < 0.0) throw DensityError("density values must be finite and non-negative");
  }
  const auto q = amplitudes(values_);
  amplitude_ = CubicSpline(grid_.nodes(), q);
  peak_ = static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) - values_.begin());

  cumulative_.assign(grid_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    cumulative_[i + 1] = cumulative_[i] + segment_mass(grid_[i], grid_[i + 1]);
  }
}

void RadialDensity::amplitude_and_slope(double rho, double& q, double& dq) const {
  if (rho < grid_.R() || rho > grid_.R_max()) {
    q = 0.0;
    dq = 0.0;
    return;
  }
  amplitude_.evaluate(rho, q, dq);
}

double RadialDensity::amplitude(double rho) const {
  double q, dq;
  amplitude_and_slope(rho, q, dq);
  return q;
}

double RadialDensity::operator()(double rho) const {
  const double q = amplitude(rho);
  return q * q;
}

double RadialDensity::derivative(double rho) const {
  double q, dq;
  amplitude_and_slope(rho, q, dq);
  return 2.0 * q * dq;
}

QuadratureValue RadialDensity::integrate(const std::function<double(double, double, double)>& g) const {
  double total = 0.0, error = 0.0;
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    const double mid = 0.5 * (grid_[i] + grid_[i + 1]);
    const double half = 0.5 * (grid_[i + 1] - grid_[i]);
    auto at = [&](double t) {
      double q, dq;
      amplitude_.evaluate(mid + half * t, q, dq);
      return g(mid + half * t, q, dq);
    };
    const double center = at(0.0);
    double gl5 = kGl5Weights[0] * center;
    for (std::size_t k = 1; k < kGl5Nodes.size(); ++k) gl5 += kGl5Weights[k] * at(kGl5Nodes[k]);
    const double gl3 = kGl3Center * center + kGl3Side * (at(kGl3Nodes[0]) + at(kGl3Nodes[1]));
    total += half * gl5;
    error += half * std::abs(gl5 - gl3);
  }
  return {total, error};
}

double RadialDensity::normalization() const { return cumulative_.back(); }

RadialDensity RadialDensity::normalized() const {
  const double mass = normalization();
  if (!(mass > 0.0)) throw DensityError("cannot normalize a density with zero mass");
  std::vector<double> scaled(values_);
  for (double& p : scaled) p /= mass;
  return RadialDensity(grid_, std::move(scaled));
}

double RadialDensity::segment_mass(double lo, double hi) const {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (std::size_t k = 0; k < kGl5Nodes.size(); ++k) {
    const double rho = mid + half * kGl5Nodes[k];
    const double q = amplitude_(rho);
    sum += kGl5Weights[k] * rho * q * q;
  }
  return kTwoPi * half * sum;
}

double RadialDensity::cdf(double rho) const {
  const double total = cumulative_.back();
  if (!(total > 0.0)) throw DensityError("cdf of a density with zero mass");
  if (rho <= grid_.R()) return 0.0;
  if (rho >= grid_.R_max()) return 1.0;
  const std::size_t i = amplitude_.segment(rho);
  return (cumulative_[i] + segment_mass(grid_[i], rho)) / total;
}

double RadialDensity::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw InputError("quantile level must lie in [0, 1]");
  const double total = cumulative_.back();
  if (!(total > 0.0)) throw DensityError("quantile of a density with zero mass");
  const double target = u * total;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.begin()) return grid_.R();
  if (it == cumulative_.end()) return grid_.R_max();
  const auto i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const double remaining = target - cumulative_[i];
  auto excess = [&](double x) { return segment_mass(grid_[i], x) - remaining; };
  const double lo = grid_[i], hi = grid_[i + 1];
  if (excess(hi) <= 0.0) return hi;
  if (remaining <= 0.0) return lo;
  return numerics::find_root(excess, lo, hi, 1e-12 * (hi - lo));
}

RadialDrift::RadialDrift(const RadialDensity& density, double D)
    : density_(std::make_shared<const RadialDensity>(density)),
      D_(D),
      peak_rho_(density.grid()[density.peak_index()]) {
  const auto& grid = density_->grid();
  const auto values = density_->values();
  nodal_.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i] > 0.0) {
      double q, dq;
      density_->amplitude_and_slope(grid[i], q, dq);
      nodal_[i] = 2.0 * D_ * dq / q;
    } else {
      nodal_[i] = grid[i] <= peak_rho_ ? kInf : -kInf;
    }
  }
}

double RadialDrift::operator()(double rho) const {
  double q, dq;
  density_->amplitude_and_slope(rho, q, dq);
  if (!(q > 0.0)) return rho <= peak_rho_ ? kInf : -kInf;
  return 2.0 * D_ * dq / q;
}

RadialDrift radial_drift(const RadialDensity& density, const PhysicalParams& params) {
  const auto values = density.values();
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (!(values[i] > 0.0)) {
      throw DensityError("density vanishes at interior node " + std::to_string(i) +
                         "; log-derivative undefined");
    }
  }
  return RadialDrift(density, params.D);
}

QuadratureValue winding_constant_with_error(const RadialDensity& density) {
  return density.integrate([](double rho, double q, double) { return q * q / rho; });
}

double winding_constant(const RadialDensity& density) { return winding_constant_with_error(density).value; }

AngularDrift angular_drift(const RadialDensity& density, const PhysicalParams& params) {
  const double C = winding_constant(density);
  if (!(C > 0.0)) throw DensityError("winding constant vanishes; angular drift undefined");
  return AngularDrift(params.V / (kTwoPi * params.R * C));
}

double mean_angular_velocity(const RadialDensity& density, const std::function<double(double)>& v_phi) {
  return kTwoPi * density.integrate([&](double rho, double q, double) { return v_phi(rho) * q * q; }).value;
}

DriftField drift_field(const RadialDensity& density, const PhysicalParams& params) {
  DriftField field;
  field.radial = radial_drift(density, params);
  field.tangential = angular_drift(density, params);
  field.rho_min = density.R();
  field.rho_max = density.R_max();
  return field;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string density_to_csv(const RadialDensity& density, std::string_view comment) {
  std::ostringstream out;
  if (!comment.empty()) {
    std::istringstream lines{std::string(comment)};
    for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
  }
  out << "rho,P\n";
  const auto& grid = density.grid();
  const auto values = density.values();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << format_double(grid[i]) << ',' << format_double(values[i]) << '\n';
  }
  return out.str();
}

RadialDensity density_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  std::vector<double> nodes, values;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "rho,P") throw InputError("density CSV must start with header 'rho,P'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError("malformed density CSV row: " + line);
    char* end = nullptr;
    const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
    const double rho = std::strtod(a.c_str(), &end);
    if (end == a.c_str() || *end != '\0') throw InputError("malformed radius in CSV row: " + line);
    const double p = std::strtod(b.c_str(), &end);
    if (end == b.c_str() || *end != '\0') throw InputError("malformed density in CSV row: " + line);
    nodes.push_back(rho);
    values.push_back(p);
  }
  if (!header) throw InputError("density CSV has no header");
  return RadialDensity(RadialGrid(std::move(nodes)), std::move(values));
}

nlohmann::json density_to_json(const RadialDensity& density) {
  const auto nodes = density.grid().nodes();
  const auto values = density.values();
  return {{"R", density.R()},
          {"nodes", std::vector<double>(nodes.begin(), nodes.end())},
          {"values", std::vector<double>(values.begin(), values.end())}};
}

RadialDensity density_from_json(const nlohmann::json& j) {
  try {
    auto nodes = j.at("nodes").get<std::vector<double>>();
    auto values = j.at("values").get<std::vector<double>>();
    const double R = j.at("R").get<double>();
    if (nodes.empty() || nodes.front() != R) throw InputError("density JSON: first node must equal R");
    return RadialDensity(RadialGrid(std::move(nodes)), std::move(values));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("density JSON: ") + e.what());
  }
}

}  // namespace discwalk
