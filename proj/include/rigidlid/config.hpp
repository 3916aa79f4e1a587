#pragma once

#include <string>

#include <json.hpp>

#include "rigidlid/ratelab.hpp"

namespace rigidlid {

using json = nlohmann::json;

// Parses JSON text; syntax errors become Config errors with line:col.
json parse_json_text(const std::string& text, const std::string& origin = "<string>");
json parse_json_file(const std::string& path);

struct SimulationConfig {
  ModelSpec model;
  int n = 1024;
  double length = 200.0;
  InitialData init;
  SolverConfig solver;
  double t_end = 1.0;
  int n_snapshots = 20;

  void validate() const;
};

// Unknown keys and wrong types throw Config errors. Missing keys keep defaults.
SimulationConfig simulation_from_json(const json& j, const std::string& text = "");
json to_json(const SimulationConfig& c);

ExperimentSpec experiment_from_json(const json& j, const std::string& text = "");
json to_json(const ExperimentSpec& s);

// Builds the grid and initial state and runs the solver; snapshots are evenly
// spaced unless solver.snapshot_times is given.
Trajectory simulate(const SimulationConfig& c);

json to_json(const ModelSpec& m);
json to_json(const InitialData& d);
json to_json(const SolverConfig& c);

// "inf" and numbers are both accepted for exponents
double exponent_from_json(const json& j, const std::string& what);
json exponent_to_json(double v);

}  // namespace rigidlid
