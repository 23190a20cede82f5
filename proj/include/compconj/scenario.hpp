#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "compconj/composite.hpp"
#include "compconj/duality.hpp"
#include "compconj/qual.hpp"

namespace compconj {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownExample : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

struct CheckEntry {
  std::string check_id;
  Json computed;
  Json expected;
  double abs_dev = 0.0;
  bool pass = false;
  std::string note;
};

struct RunReport {
  std::string scenario;
  std::vector<CheckEntry> checks;
  std::vector<DualityReport> duality;
  ConditionReport conditions;
  double timing_ms = 0.0;

  bool all_pass() const;
  Json to_json(bool include_timing = true) const;
};

struct RunOptions {
  double tol_scale = 1.0;
  // "x:lo:hi:count" entries replacing a grid uniformly across its axes.
  std::vector<std::string> grid_overrides;
  std::string dump_dir;  // when nonempty, CSV dumps of the computed grids
};

// Executes the scenario pipeline (sampling, conjugates, rho/rho~/eta, duality
// probes, kconv estimates, qualification battery) and evaluates the expected
// block plus the built-in inequality invariants.
RunReport run_scenario_json(const Json& spec, const RunOptions& opts = {});
RunReport run_scenario_file(const std::string& path, const RunOptions& opts = {});

// Built-in reproductions. Names: ex51, ex51-repaired, ex52, ex52-repaired,
// ex53, nonattain-dual, nonattain-primal.
const std::vector<std::string>& builtin_example_names();
Json builtin_example_spec(const std::string& name);
RunReport run_example(const std::string& name, const RunOptions& opts = {});

// Scenario ingredients exposed for tests and the CLI.
CompositeProblem problem_from_spec(const Json& spec, const RunOptions& opts = {});
Grid grid_from_json(const Json& j);
Cone cone_from_json(const Json& j, int dim);

double round_sig(double v, int digits = 12);

}  // namespace compconj
