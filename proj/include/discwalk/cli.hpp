#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "discwalk/model.hpp"
#include "discwalk/montecarlo.hpp"

// Command-line front end. Lives in the library so tests can drive it.
namespace discwalk::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kConfigError = 2,
  kNumericalError = 3,
  kVerificationFailure = 4,
};

struct RunConfig {
  std::string command;
  PhysicalParams params{100.0, 1.0, 1.0};
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string format = "csv";  // density files: csv or json

  // asymptotic
  std::string constant = "leading";  // or self-consistent
  std::size_t nodes = RadialGrid::kDefaultNodes;

  // solve
  double tol = 1e-10;
  int max_iter = 200;
  double theta = 0.5;
  std::vector<double> sweep_R;

  // simulate
  montecarlo::SimConfig sim;
  std::string density = "asymptotic";  // target for simulate and action: asymptotic or solved
  double ks_threshold = 0.02;

  // verify
  int n_perturbations = 50;
  std::string fault = "none";  // or airy-scale

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);

/// Overlays a JSON config onto `base`. Throws ConfigError on unknown keys or
/// wrongly typed values.
RunConfig apply_json(RunConfig base, const nlohmann::json& j);

/// Parses arguments, runs the command, returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace discwalk::cli
