#include "discwalk/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "discwalk/asymptotic.hpp"
#include "discwalk/bvp.hpp"
#include "discwalk/errors.hpp"
#include "discwalk/variational.hpp"
#include "discwalk/verify.hpp"

namespace discwalk::cli {

namespace {

namespace fs = std::filesystem;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T>
T get_as(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

using Setter = std::function<void(RunConfig&, const nlohmann::json&)>;

void apply_block(RunConfig& c, const nlohmann::json& block, const std::string& prefix,
                 const std::map<std::string, Setter>& setters) {
  if (!block.is_object()) throw ConfigError("config block '" + prefix + "' must be an object");
  for (const auto& [key, value] : block.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + prefix + key + "'");
    it->second(c, value);
  }
}

template <typename T, typename F>
Setter field(const std::string& key, F assign) {
  return [key, assign](RunConfig& c, const nlohmann::json& v) { assign(c, get_as<T>(v, key)); };
}

std::string metadata(const RunConfig& c) {
  return "discwalk " + c.command + "\nconfig: " + to_json(c).dump();
}

void write_file(const RunConfig& c, const std::string& name, const std::string& text) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoFailure("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path path = dir / name;
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoFailure("cannot open " + path.string() + " for writing");
  file << text;
  if (!file) throw IoFailure("failed writing " + path.string());
}

void write_json(const RunConfig& c, const std::string& name, nlohmann::json body) {
  body["config"] = to_json(c);
  write_file(c, name, body.dump(2) + "\n");
}

void write_density(const RunConfig& c, const std::string& stem, const RadialDensity& P) {
  if (c.format == "json") {
    write_json(c, stem + ".json", density_to_json(P));
  } else {
    write_file(c, stem + ".csv", density_to_csv(P, metadata(c)));
  }
}

PhysicalParams checked(const PhysicalParams& p) { return PhysicalParams(p.R, p.V, p.D); }

RadialDensity target_density(const RunConfig& c, const PhysicalParams& params) {
  if (c.density == "solved") {
    bvp::SolverOptions opts;
    opts.theta = c.theta;
    opts.nodes = c.nodes;
    return bvp::self_consistent_solve(params, c.tol, c.max_iter, opts).P;
  }
  return asymptotic::asymptotic_density(params, asymptotic::leading_constant(params),
                                        RadialGrid::for_params(params, c.nodes))
      .normalized();
}

int cmd_asymptotic(const RunConfig& c, std::ostream& out) {
  const auto params = checked(c.params);
  const double leading = asymptotic::leading_constant(params);
  nlohmann::json body;
  body["C_leading"] = leading;
  double C = leading;
  if (c.constant == "self-consistent") {
    C = asymptotic::self_consistent_constant(params);
    body["C_self_consistent"] = C;
    write_json(c, "constant_report.json", asymptotic::to_json(asymptotic::constant_report(params)));
  } else if (params.V > 0.0) {
    body["C_self_consistent"] = asymptotic::self_consistent_constant(params);
    write_json(c, "constant_report.json", asymptotic::to_json(asymptotic::constant_report(params)));
  }
  body["C_used"] = C;
  body["constants"] = asymptotic::to_json(asymptotic::constants_for(params, C));
  body["mode_offset"] = asymptotic::mode_offset(params, C);
  body["strip_width"] = strip_width(params);
  const auto P = asymptotic::asymptotic_density(params, C, RadialGrid::for_params(params, c.nodes));
  body["normalization"] = P.normalization();
  write_density(c, "P", P);
  write_json(c, "constants.json", body);
  out << body.dump(2) << "\n";
  return kSuccess;
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
  bvp::SolverOptions opts;
  opts.theta = c.theta;
  opts.nodes = c.nodes;
  const bool sweep = !c.sweep_R.empty();
  const std::vector<double> radii = sweep ? c.sweep_R : std::vector<double>{c.params.R};

  std::ostringstream table;
  table << "R,sup_error,l1_error,sup_error_solved_mu,gamma,gamma_linearized,gamma_relative_gap,C,C_first_order,"
           "iterations\n";
  auto rows = nlohmann::json::array();
  for (double R : radii) {
    const PhysicalParams params(R, c.params.V, c.params.D);
    const auto solution = bvp::self_consistent_solve(params, c.tol, c.max_iter, opts);
    const auto cmp = bvp::compare_with_airy(solution);
    table << format_double(R) << ',' << format_double(cmp.sup_error) << ',' << format_double(cmp.l1_error) << ','
          << format_double(cmp.sup_error_solved_mu) << ',' << format_double(cmp.gamma) << ','
          << format_double(cmp.gamma_linearized) << ',' << format_double(cmp.gamma_relative_gap) << ','
          << format_double(cmp.C) << ',' << format_double(cmp.C_first_order) << ',' << solution.iterations << '\n';
    auto row = bvp::to_json(cmp);
    row["R"] = R;
    row["iterations"] = solution.iterations;
    rows.push_back(row);
    if (!sweep) {
      auto body = bvp::to_json(solution);
      body["comparison"] = bvp::to_json(cmp);
      write_json(c, "solution.json", body);
      write_density(c, "P", solution.P);
    }
  }
  if (c.format == "json") {
    write_json(c, "comparison.json", {{"rows", rows}});
  } else {
    std::string text;
    std::istringstream lines(metadata(c));
    for (std::string line; std::getline(lines, line);) text += "# " + line + "\n";
    write_file(c, "comparison.csv", text + table.str());
  }
  out << rows.dump(2) << "\n";
  return kSuccess;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const auto params = checked(c.params);
  const auto target = target_density(c, params);
  auto sim = c.sim;
  sim.seed = c.seed;
  auto stats = montecarlo::simulate(params, target, sim);
  const auto report = montecarlo::compare_distribution(stats, target, c.ks_threshold);
  stats.ks_distance = report.ks;
  RunConfig resolved = c;
  resolved.sim = stats.config;
  write_file(resolved, "histogram.csv", montecarlo::stats_to_csv(stats, metadata(resolved)));
  write_json(resolved, "stats.json", montecarlo::stats_to_json(stats, params));
  write_json(resolved, "comparison.json", montecarlo::to_json(report));
  out << montecarlo::stats_to_json(stats, params).dump(2) << "\n";
  return kSuccess;
}

int cmd_action(const RunConfig& c, std::ostream& out) {
  const auto params = checked(c.params);
  const auto P = target_density(c, params);
  const auto breakdown = variational::action_of_density(P, params);
  const auto by_velocity = variational::action_of_velocity(P, drift_field(P, params));
  nlohmann::json body{{"density", c.density},
                      {"action_of_density", variational::to_json(breakdown)},
                      {"action_of_velocity", {{"value", by_velocity.value}, {"error", by_velocity.error}}},
                      {"winding_constant", winding_constant(P)}};
  write_json(c, "action.json", body);
  out << body.dump(2) << "\n";
  return kSuccess;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  verify::Options opts;
  opts.params = checked(c.params);
  opts.seed = c.seed;
  opts.n_perturbations = c.n_perturbations;
  opts.airy_scale = c.fault == "airy-scale" ? 1.01 : 1.0;
  const auto report = verify::run(opts);
  const auto body = verify::to_json(report);
  write_json(c, "verify.json", body);
  out << body.dump(2) << "\n";
  return report.passed ? kSuccess : kVerificationFailure;
}

}  // namespace

void RunConfig::validate() const {
  try {
    checked(params);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
  if (constant != "leading" && constant != "self-consistent") {
    throw ConfigError("constant must be leading or self-consistent");
  }
  if (density != "asymptotic" && density != "solved") throw ConfigError("density must be asymptotic or solved");
  if (fault != "none" && fault != "airy-scale") throw ConfigError("fault must be none or airy-scale");
  if (nodes < RadialGrid::kMinNodes) throw ConfigError("nodes must be at least 16");
  if (!(tol > 0.0 && tol <= 1e-3)) throw ConfigError("tol must lie in (0, 1e-3]");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in (0, 1]");
  for (double R : sweep_R) {
    if (!(R > 0.0) || !std::isfinite(R)) throw ConfigError("sweep radii must be positive");
  }
  if (!(ks_threshold > 0.0)) throw ConfigError("ks_threshold must be positive");
  if (n_perturbations < 10) throw ConfigError("n_perturbations must be at least 10");
  if (out.empty()) throw ConfigError("output directory must not be empty");
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"command", c.command},
          {"R", c.params.R},
          {"V", c.params.V},
          {"D", c.params.D},
          {"seed", c.seed},
          {"out", c.out},
          {"format", c.format},
          {"asymptotic", {{"constant", c.constant}}},
          {"nodes", c.nodes},
          {"solve", {{"tol", c.tol}, {"max_iter", c.max_iter}, {"theta", c.theta}, {"sweep_R", c.sweep_R}}},
          {"simulate",
           {{"dt", c.sim.dt},
            {"n_steps", c.sim.n_steps},
            {"n_paths", c.sim.n_paths},
            {"burn_in", c.sim.burn_in},
            {"drift_cap", c.sim.drift_cap},
            {"histogram_bins", c.sim.histogram_bins},
            {"ks_threshold", c.ks_threshold}}},
          {"density", c.density},
          {"verify", {{"n_perturbations", c.n_perturbations}, {"fault", c.fault}}}};
}

RunConfig apply_json(RunConfig base, const nlohmann::json& j) {
  const std::map<std::string, Setter> asymptotic_keys{
      {"constant", field<std::string>("asymptotic.constant", [](RunConfig& c, std::string v) { c.constant = v; })},
  };
  const std::map<std::string, Setter> solve_keys{
      {"tol", field<double>("solve.tol", [](RunConfig& c, double v) { c.tol = v; })},
      {"max_iter", field<int>("solve.max_iter", [](RunConfig& c, int v) { c.max_iter = v; })},
      {"theta", field<double>("solve.theta", [](RunConfig& c, double v) { c.theta = v; })},
      {"sweep_R", field<std::vector<double>>("solve.sweep_R",
                                             [](RunConfig& c, std::vector<double> v) { c.sweep_R = v; })},
  };
  const std::map<std::string, Setter> simulate_keys{
      {"dt", field<double>("simulate.dt", [](RunConfig& c, double v) { c.sim.dt = v; })},
      {"n_steps", field<std::int64_t>("simulate.n_steps", [](RunConfig& c, std::int64_t v) { c.sim.n_steps = v; })},
      {"n_paths", field<std::int64_t>("simulate.n_paths", [](RunConfig& c, std::int64_t v) { c.sim.n_paths = v; })},
      {"burn_in", field<std::int64_t>("simulate.burn_in", [](RunConfig& c, std::int64_t v) { c.sim.burn_in = v; })},
      {"drift_cap", field<double>("simulate.drift_cap", [](RunConfig& c, double v) { c.sim.drift_cap = v; })},
      {"histogram_bins",
       field<int>("simulate.histogram_bins", [](RunConfig& c, int v) { c.sim.histogram_bins = v; })},
      {"threads", field<int>("simulate.threads", [](RunConfig& c, int v) { c.sim.threads = v; })},
      {"ks_threshold", field<double>("simulate.ks_threshold", [](RunConfig& c, double v) { c.ks_threshold = v; })},
  };
  const std::map<std::string, Setter> verify_keys{
      {"n_perturbations",
       field<int>("verify.n_perturbations", [](RunConfig& c, int v) { c.n_perturbations = v; })},
      {"fault", field<std::string>("verify.fault", [](RunConfig& c, std::string v) { c.fault = v; })},
  };
  const std::map<std::string, Setter> top{
      {"command", [](RunConfig&, const nlohmann::json&) {}},
      {"R", field<double>("R", [](RunConfig& c, double v) { c.params.R = v; })},
      {"V", field<double>("V", [](RunConfig& c, double v) { c.params.V = v; })},
      {"D", field<double>("D", [](RunConfig& c, double v) { c.params.D = v; })},
      {"seed", field<std::uint64_t>("seed", [](RunConfig& c, std::uint64_t v) { c.seed = v; })},
      {"out", field<std::string>("out", [](RunConfig& c, std::string v) { c.out = v; })},
      {"format", field<std::string>("format", [](RunConfig& c, std::string v) { c.format = v; })},
      {"nodes", field<std::size_t>("nodes", [](RunConfig& c, std::size_t v) { c.nodes = v; })},
      {"density", field<std::string>("density", [](RunConfig& c, std::string v) { c.density = v; })},
      {"asymptotic", [&](RunConfig& c, const nlohmann::json& v) { apply_block(c, v, "asymptotic.", asymptotic_keys); }},
      {"solve", [&](RunConfig& c, const nlohmann::json& v) { apply_block(c, v, "solve.", solve_keys); }},
      {"simulate", [&](RunConfig& c, const nlohmann::json& v) { apply_block(c, v, "simulate.", simulate_keys); }},
      {"verify", [&](RunConfig& c, const nlohmann::json& v) { apply_block(c, v, "verify.", verify_keys); }},
  };
  apply_block(base, j, "", top);
  return base;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stationary radial law of a Brownian particle winding around a disc"};
  app.require_subcommand(1);

  struct Flags {
    double R = 0, V = 0, D = 0, tol = 0, theta = 0, dt = 0, drift_cap = 0, ks = 0;
    std::uint64_t seed = 0;
    std::string out, format, config, constant, density, fault;
    std::vector<double> sweep;
    int max_iter = 0, perturbations = 0, bins = 0, threads = 0;
    std::int64_t steps = 0, paths = 0, burn = 0;
    std::size_t nodes = 0;
  } f;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overrides;
  std::vector<CLI::Option*> config_options;

  auto common = [&](CLI::App* sub) {
    overrides.emplace_back(sub->add_option("--R", f.R, "disc radius"), [&](RunConfig& c) { c.params.R = f.R; });
    overrides.emplace_back(sub->add_option("--V", f.V, "tangential speed"), [&](RunConfig& c) { c.params.V = f.V; });
    overrides.emplace_back(sub->add_option("--D", f.D, "diffusion coefficient"),
                           [&](RunConfig& c) { c.params.D = f.D; });
    overrides.emplace_back(sub->add_option("--seed", f.seed, "random seed"), [&](RunConfig& c) { c.seed = f.seed; });
    overrides.emplace_back(sub->add_option("--out", f.out, "output directory"), [&](RunConfig& c) { c.out = f.out; });
    overrides.emplace_back(sub->add_option("--format", f.format, "density file format (csv or json)"),
                           [&](RunConfig& c) { c.format = f.format; });
    overrides.emplace_back(sub->add_option("--nodes", f.nodes, "radial grid nodes"),
                           [&](RunConfig& c) { c.nodes = f.nodes; });
    config_options.push_back(sub->add_option("--config", f.config, "JSON config file; flags override it"));
  };
  auto solver = [&](CLI::App* sub) {
    overrides.emplace_back(sub->add_option("--tol", f.tol, "self-consistency tolerance"),
                           [&](RunConfig& c) { c.tol = f.tol; });
    overrides.emplace_back(sub->add_option("--max-iter", f.max_iter, "self-consistency iterations"),
                           [&](RunConfig& c) { c.max_iter = f.max_iter; });
    overrides.emplace_back(sub->add_option("--theta", f.theta, "damping of the C update"),
                           [&](RunConfig& c) { c.theta = f.theta; });
  };
  auto density_source = [&](CLI::App* sub) {
    overrides.emplace_back(sub->add_option("--density", f.density, "asymptotic or solved"),
                           [&](RunConfig& c) { c.density = f.density; });
  };

  auto* asym = app.add_subcommand("asymptotic", "Airy-profile density and constants");
  common(asym);
  overrides.emplace_back(asym->add_option("--constant", f.constant, "leading or self-consistent"),
                         [&](RunConfig& c) { c.constant = f.constant; });

  auto* solve = app.add_subcommand("solve", "Self-consistent boundary-value solution");
  common(solve);
  solver(solve);
  overrides.emplace_back(solve->add_option("--sweep-R", f.sweep, "comma-separated radii")->delimiter(','),
                         [&](RunConfig& c) { c.sweep_R = f.sweep; });

  auto* simulate = app.add_subcommand("simulate", "Langevin simulation against a target density");
  common(simulate);
  solver(simulate);
  density_source(simulate);
  overrides.emplace_back(simulate->add_option("--dt", f.dt, "time step"), [&](RunConfig& c) { c.sim.dt = f.dt; });
  overrides.emplace_back(simulate->add_option("--steps", f.steps, "steps per path"),
                         [&](RunConfig& c) { c.sim.n_steps = f.steps; });
  overrides.emplace_back(simulate->add_option("--paths", f.paths, "number of paths"),
                         [&](RunConfig& c) { c.sim.n_paths = f.paths; });
  overrides.emplace_back(simulate->add_option("--burn-in", f.burn, "discarded steps per path"),
                         [&](RunConfig& c) { c.sim.burn_in = f.burn; });
  overrides.emplace_back(simulate->add_option("--drift-cap", f.drift_cap, "cap on |v_rho|"),
                         [&](RunConfig& c) { c.sim.drift_cap = f.drift_cap; });
  overrides.emplace_back(simulate->add_option("--bins", f.bins, "histogram bins"),
                         [&](RunConfig& c) { c.sim.histogram_bins = f.bins; });
  overrides.emplace_back(simulate->add_option("--threads", f.threads, "worker threads (0 = all cores)"),
                         [&](RunConfig& c) { c.sim.threads = f.threads; });
  overrides.emplace_back(simulate->add_option("--ks-threshold", f.ks, "KS pass threshold"),
                         [&](RunConfig& c) { c.ks_threshold = f.ks; });

  auto* action = app.add_subcommand("action", "Action of a density");
  common(action);
  solver(action);
  density_source(action);

  auto* verify_cmd = app.add_subcommand("verify", "Run the property suite");
  common(verify_cmd);
  overrides.emplace_back(verify_cmd->add_option("--perturbations", f.perturbations, "minimality perturbations"),
                         [&](RunConfig& c) { c.n_perturbations = f.perturbations; });
  overrides.emplace_back(verify_cmd->add_option("--inject-fault", f.fault, "none or airy-scale (negative control)"),
                         [&](RunConfig& c) { c.fault = f.fault; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  const auto subs = app.get_subcommands();
  RunConfig config;
  config.command = subs.front()->get_name();
  try {
    if (!f.config.empty()) {
      std::ifstream file(f.config);
      if (!file) throw ConfigError("cannot read config file " + f.config);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(file);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file " + f.config + " is not valid JSON: " + e.what());
      }
      config = apply_json(config, j);
    }
    for (auto& [opt, apply] : overrides) {
      if (opt->count() > 0) apply(config);
    }
    config.validate();

    if (config.command == "asymptotic") return cmd_asymptotic(config, out);
    if (config.command == "solve") return cmd_solve(config, out);
    if (config.command == "simulate") return cmd_simulate(config, out);
    if (config.command == "action") return cmd_action(config, out);
    return cmd_verify(config, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoFailure& e) {
    err << "i/o error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NonConvergenceError& e) {
    err << "numerical error: " << e.what() << " (C history:";
    for (double c : e.history()) err << ' ' << format_double(c);
    err << ")\n";
    return kNumericalError;
  } catch (const AccuracyError& e) {
    err << "numerical error: " << e.what() << " (best estimate " << format_double(e.best_estimate())
        << ", error bound " << format_double(e.error_bound()) << ")\n";
    return kNumericalError;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace discwalk::cli
