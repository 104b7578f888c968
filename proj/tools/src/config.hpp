#pragma once

#include "fkq/geometry.hpp"
#include "fkq/types.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace fkq::cli {

/// Extent of a generated point set: explicit box/ball, or derived from the
/// interaction targets grown by `margin`.
struct ExtentSpec {
  std::optional<Region> region;
  double margin = 10.0;
};

struct PointsetSpec {
  std::string kind;  // periodic | fibonacci | ammann-beenker | csv
  int dim = 1;
  double spacing = 1.0;
  std::string path;
  ExtentSpec extent;
};

struct PotentialSpec {
  std::string kind;  // bump | one_minus_cos
  int dim = 1;
  double amplitude = 1.0;
  std::optional<double> support;  // defaults to the packing radius
  int sign = 1;
  std::optional<Mat> scale_matrix;
};

struct InteractionSpec {
  std::string family;
  IVec lo, hi;                          // integer window (lattice families)
  std::optional<Region> physical_window;  // address_neighborhood
  double p = 4.0;
  double tau = 2.0;
};

struct TypeConfig {
  std::optional<Mat> sigma;  // nullopt: use the address projection psi
  std::optional<double> radius;  // nullopt: 2 r_Z
};

struct ModeSpec {
  enum class Kind { magnified, scaled, automatic };
  Kind kind = Kind::magnified;
  double lambda = 0.0;
  std::optional<int> n;  // scaled: nullopt means N + 1
  double multiplier = 2.0;
};

struct AtlasSpec {
  std::optional<double> grid_step;
  std::string select = "all";
  int probe_count = 8;
  double margin = 2.0 * M_PI;
  std::optional<Region> region;
};

struct Tolerances {
  double tol = 1e-12;
  int max_iter = 10000;
  double residual_tol = 1e-9;
  double atlas_tol = 1e-12;
};

struct VerifySpec {
  int probes = 5;
  double amplitude = 0.1;
};

struct OutputSpec {
  std::string dir = "out";
  std::string report = "report.csv";
  std::string summary = "summary.json";
  std::string constants = "constants.json";
  std::string points = "points.csv";
  std::string atlas = "atlas.csv";
};

struct PipelineConfig {
  std::string name;
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<PointsetSpec> pointset;
  PotentialSpec potential;
  InteractionSpec interaction;
  TypeConfig type;
  ModeSpec mode;
  AtlasSpec atlas;
  Tolerances tolerances;
  VerifySpec verify;
  OutputSpec output;
  std::string source;  // file the config came from
};

/// Parses and validates a JSON config. Unknown keys, missing required keys
/// and ill-typed values raise ConfigError with "source:line: path: message".
PipelineConfig parse_config(const std::string& text, const std::string& source = "<config>");
PipelineConfig load_config(const std::string& path);

}  // namespace fkq::cli
