#pragma once

#include "relax/builder.hpp"
#include "relax/hypersolver.hpp"

#include <filesystem>
#include <map>

namespace relax {

/// Malformed experiment description; the message names the line and/or field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Parsed experiment file. Grammar: `[section]` headers, `key = value` lines,
/// `#` comments; see configs/README.md for the keys of each section.
struct ExperimentConfig {
  // [system]
  std::string kind;  // demo | reaction-diffusion | sqrt-symbol | raw
  std::string demo;
  std::string reaction = "none";  // none | logistic
  int k = 1;
  int d = 1;
  Matrix diffusion;  // kd x kd, constant
  std::vector<Matrix> raw_coefficients;
  Matrix raw_source;  // linear B(W) = S W
  Matrix transform;
  int conserved = 0;
  std::optional<StateBox> box;

  // [grid]
  std::vector<int> cells;
  std::vector<double> lengths;

  // [solver]
  double eps = 0.05;
  double T = 0.1;
  SolverOptions solver;

  // [experiment]
  std::string init = "sine";  // sine | constant
  std::optional<double> mean;
  std::optional<double> amplitude;
  bool well_prepared = true;
  std::vector<double> ladder;
  bool reference = false;
  int reference_refinement = 4;
  int directions = 64;
  int sample_points = 8;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Everything a command needs, assembled from a config.
struct Experiment {
  std::string name;
  RelaxationSystem system;
  std::optional<ParabolicTarget> target;
  StateBox box;
  SpatialGrid grid;
  Matrix initial_uI;
};

Experiment build_experiment(const ExperimentConfig& config);

}  // namespace relax
