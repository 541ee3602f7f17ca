#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "discwalk/model.hpp"

// Property suite run by `discwalk verify`.
namespace discwalk::verify {

struct Options {
  PhysicalParams params{100.0, 1.0, 1.0};
  std::uint64_t seed = 1;
  int n_perturbations = 50;
  /// Multiplies Ai inside the identity checks; 1 leaves them intact. A
  /// negative control for the suite itself.
  double airy_scale = 1.0;
};

struct Check {
  std::string name;
  bool passed = false;
  bool informational = false;  // reported, never gating
  double value = 0.0;
  double tolerance = 0.0;
  nlohmann::json detail;
};

struct Report {
  std::vector<Check> checks;
  bool passed = false;  // all gating checks pass
};

Report run(const Options& options);
nlohmann::json to_json(const Report& r);

}  // namespace discwalk::verify
