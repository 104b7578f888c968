#pragma once

#include "fkq/interaction.hpp"
#include "fkq/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fkq {

/// Constants of one pipeline run, as written to the sidecar file.
struct RunConstants {
  double b = 0.0;
  double domain_radius = 0.0;
  double inverse_bound = 0.0;
  double epsilon_prime = 0.0;
  double lambda_star = 0.0;
  std::optional<int> n_threshold;
  double covering_radius_z = 0.0;
};

/// Interior rows: i0..i{r-1}, target0.., anchor0.., u0.., residual.
void write_report_csv(std::ostream& out, const EquilibriumReport& report, const InteractionModel& model);

struct ReportRow {
  IVec index;
  Vec target;
  Vec anchor;
  Vec u;
  double residual = 0.0;
};

/// Reads a report CSV back. The rank and value dimension are taken from the
/// header.
std::vector<ReportRow> read_report_csv(std::istream& in);

std::string constants_json(const RunConstants& c);

/// JSON summary: mode, constants, residual_sup, rho_empirical, iterations,
/// delta_trace, verification clauses and the pinned collar values.
std::string summary_json(const EquilibriumReport& report, const InteractionModel& model,
                         const RunConstants& constants, const VerificationSummary& verification);

/// printf("%.17g").
std::string format_double(double v);

}  // namespace fkq
