#pragma once

#include "fkq/interaction.hpp"
#include "fkq/landscape.hpp"
#include "fkq/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fkq {

/// magnified(lambda): solve Q_i(u) + lambda grad V(u_i) = 0.
/// scaled(n): solve Q_i(u) + (A^n)^T grad V(A^n u_i) = 0.
struct SolveMode {
  enum class Kind { magnified, scaled };
  Kind kind = Kind::magnified;
  double lambda = 0.0;
  int n = 0;
  /// Overrides the potential's own scale matrix in scaled mode.
  std::optional<Mat> a;

  static SolveMode magnified(double lambda) { return {Kind::magnified, lambda, 0, std::nullopt}; }
  static SolveMode scaled(int n, std::optional<Mat> a = std::nullopt) {
    return {Kind::scaled, 0.0, n, std::move(a)};
  }
  bool is_scaled() const { return kind == Kind::scaled; }
};

struct CodingConfiguration {
  Configuration anchors;                // one per domain slot, collar included
  std::vector<std::size_t> atlas_index;  // base-atlas point z with a_i = A^{-n} z
  TypeSpec spec;
  int scale_power = 0;
  double eta = 0.0;        // sup over interior of |Q_i(a)|
  double deviation = 0.0;  // sup over interior of |a_i - sigma^T i|
};

/// a_i = the (scaled) atlas point nearest to sigma^T i, for every slot.
CodingConfiguration build_coding(const CriticalAtlas& atlas, const TypeSpec& spec,
                                 const InteractionModel& model, const SolveMode& mode);

/// Reuses the anchors of `coding` at scale power n. Every anchor must lie
/// in A^{-n} Z_V, which holds for n >= coding.scale_power when A Z_V is
/// contained in Z_V.
CodingConfiguration recode(const CodingConfiguration& coding, const CriticalAtlas& atlas,
                           const InteractionModel& model, int n,
                           const std::optional<Mat>& a = std::nullopt);

struct Thresholds {
  double lambda_star = 0.0;
  std::optional<int> n;
};

/// lambda_* = B / R_V and N = ceil(ln(B / R_V) / ln lambda_d), clamped at 0.
Thresholds thresholds(double b, double domain_radius, const std::optional<Mat>& a = std::nullopt);

/// Smallest eigenvalue magnitude of A; throws if A is not expanding.
double smallest_expansion(const Mat& a);

struct SolveOptions {
  double tol = 1e-12;
  int max_iter = 10000;
  int threads = 1;
  double residual_tol = 1e-9;
};

struct EquilibriumReport {
  SolveMode mode;
  Configuration u;
  CodingConfiguration coding;
  std::vector<double> residuals;  // interior slots
  double residual_sup = 0.0;
  double anchor_distance = 0.0;
  double type_deviation = 0.0;
  int iterations = 0;
  std::vector<double> delta_trace;
  double rho_empirical = 0.0;
};

/// Jacobi iteration u_i <- K_{a_i}(-Q_i(u) / lambda) (magnified) or
/// u_i <- A^{-n} K_{A^n a_i}(w_i), (A^n)^T w_i = -Q_i(u) (scaled), with the
/// collar pinned to the anchors. Starts from the anchors unless `start` is
/// given. Throws DomainBreachError or NonConvergenceError.
EquilibriumReport solve(const InteractionModel& model, const CriticalAtlas& atlas,
                        const CodingConfiguration& coding, const SolveMode& mode,
                        const SolveOptions& options = {}, const Configuration* start = nullptr);

/// One application of the iteration map.
Configuration apply_map(const InteractionModel& model, const CriticalAtlas& atlas,
                        const CodingConfiguration& coding, const SolveMode& mode,
                        const Configuration& u, int threads = 1);

/// Per-interior-slot residual norms of the equilibrium equation.
std::vector<double> residuals(const InteractionModel& model, const PatternPotential& base,
                              const SolveMode& mode, const Configuration& u);

struct ClauseResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct VerificationSummary {
  std::vector<ClauseResult> clauses;

  bool passed() const;
  const ClauseResult* first_failure() const;
  /// Throws VerificationFailure naming the first violated clause.
  void require() const;
};

struct VerifyOptions {
  int probes = 5;
  double amplitude = 0.1;
  std::uint64_t seed = 0;
};

/// Checks: residual, type_bound, uniqueness, contraction, type_preservation,
/// fixed_point. `b` is the interaction bound used for the run.
VerificationSummary verify(const EquilibriumReport& report, const InteractionModel& model,
                           const CriticalAtlas& atlas, double b, const SolveOptions& solve_options = {},
                           const VerifyOptions& options = {});

}  // namespace fkq
