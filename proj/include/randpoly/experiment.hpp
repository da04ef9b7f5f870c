#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "randpoly/density.hpp"

namespace randpoly {

/// Density description as read from config JSON:
///   {"class": "gaussian"|"sz"|"radial"|"product"|"uniform-polygon", "dim", "p",
///    "profile": "gaussian"|"exp-power", "factors": [...], "vertices": [[x, y], ...]}
struct DensitySpec {
  std::string klass = "gaussian";
  int dim = 2;
  double p = 2.0;
  std::string profile = "gaussian";
  std::vector<Density1D> factors;
  planar::Polygon vertices;
};

DensityND make_density(const DensitySpec& spec);
/// The 1-D law of a dim = 1 spec (gaussian, or sz as EP(p)).
Density1D make_density_1d(const DensitySpec& spec);

struct ExperimentConfig {
  std::string experiment;  // thm1 | thm2 | thm3 | lemma2 | lower-bounds | universal | zeta
  DensitySpec density;
  int dim = 2;
  double p = 2.0;
  std::vector<double> n_grid;
  std::vector<double> delta_grid;
  int trials = 1;
  double q = 1.0;
  std::optional<double> eps;  // nullopt means "auto"
  std::uint64_t master_seed = 1;
  std::string output;
  int workers = 0;  // 0: environment default
  bool record_runtime = false;
  std::vector<std::string> family{"square", "disk", "triangle"};
  int n_max = 3;
  std::size_t samples = 1'000'000;
};

std::vector<std::string> experiment_names();

/// Defaults for an experiment (the configuration the acceptance suite runs).
ExperimentConfig default_config(const std::string& experiment);

/// Overlays a JSON object on the defaults for its "experiment" field (or
/// `experiment` when given). Errors are config-error with the field path.
ExperimentConfig parse_config(const std::string& json_text, const std::string& experiment = "");

/// Checks ranges and desk-scale limits; throws config-error.
void validate(const ExperimentConfig& config);

/// Net resolution for sample size n: 1 / log n, raised so (3/eps)^d <= 1e5.
double auto_eps(double n, int dim);

/// Worker count: config value, else RANDPOLY_WORKERS, else hardware threads.
int resolve_workers(const ExperimentConfig& config);

struct ExperimentResult {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const;
  /// Column index by name; throws if missing.
  std::size_t column(const std::string& name) const;
  /// Numeric cell (NaN when empty).
  double number(std::size_t row, const std::string& name) const;
  const std::string& cell(std::size_t row, const std::string& name) const;
};

/// Runs one experiment; rows are ordered by grid point then trial,
/// independent of scheduling. Writes the CSV when config.output is set.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace randpoly
