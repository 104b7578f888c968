#pragma once

#include "config.hpp"

#include "fkq/interaction.hpp"
#include "fkq/landscape.hpp"
#include "fkq/pointset.hpp"
#include "fkq/potential.hpp"
#include "fkq/report_io.hpp"
#include "fkq/solver.hpp"

#include <memory>
#include <optional>

namespace fkq::cli {

/// Builds the stages of a run lazily, in dependency order:
/// point set -> potential -> interaction -> atlas -> constants -> solve.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  const PipelineConfig& config() const { return config_; }

  /// Null when the potential does not need a point set and none is configured.
  std::shared_ptr<const DeloneSet> pointset();
  std::shared_ptr<const PatternPotential> potential();
  const InteractionModel& model();
  /// Type spec with the configured radius; "auto" radius needs the atlas.
  TypeSpec type_spec();
  /// The scale matrix A used by the scaled regime, if any.
  std::optional<Mat> scale_matrix();
  CriticalAtlas& atlas();
  RunConstants constants();
  SolveMode mode();

  struct Outcome {
    EquilibriumReport report;
    VerificationSummary verification;
    RunConstants constants;
  };
  /// Coding, solve and verify.
  Outcome run();

 private:
  Mat sigma();
  Region target_box();

  PipelineConfig config_;
  std::shared_ptr<const DeloneSet> set_;
  bool set_built_ = false;
  std::shared_ptr<const PatternPotential> potential_;
  std::optional<AddressTable> addresses_;
  std::optional<InteractionModel> model_;
  std::optional<CriticalAtlas> atlas_;
  std::optional<RunConstants> constants_;
};

}  // namespace fkq::cli
