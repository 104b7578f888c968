#include "fkq/report_io.hpp"

#include "fkq/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace fkq {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_report_csv(std::ostream& out, const EquilibriumReport& report, const InteractionModel& model) {
  const int r = model.rank(), d = model.value_dim();
  const auto& domain = model.domain();
  for (int k = 0; k < r; ++k) out << "i" << k << ',';
  for (const char* col : {"target", "anchor", "u"})
    for (int k = 0; k < d; ++k) out << col << k << ',';
  out << "residual\n";
  for (std::size_t s = 0; s < domain.interior_size(); ++s) {
    const IVec& i = domain.index(s);
    for (int k = 0; k < r; ++k) out << i[k] << ',';
    const Vec t = report.coding.spec.target(i);
    for (const Vec* v : {&t, &report.coding.anchors[s], &report.u[s]})
      for (int k = 0; k < d; ++k) out << format_double((*v)[k]) << ',';
    out << format_double(report.residuals[s]) << '\n';
  }
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("report csv: empty file");
  int r = 0, d = 0;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) {
      if (col.rfind("i", 0) == 0) ++r;
      else if (col.rfind("u", 0) == 0) ++d;
    }
  }
  if (r < 1 || d < 1) throw ConfigError("report csv: malformed header");
  std::vector<ReportRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != r + 3 * d + 1)
      throw ConfigError("report csv: line " + std::to_string(lineno) + ": wrong column count");
    auto num = [&](std::size_t k) {
      char* end = nullptr;
      const double v = std::strtod(cells[k].c_str(), &end);
      if (end == cells[k].c_str() || *end != '\0')
        throw ConfigError("report csv: line " + std::to_string(lineno) + ": bad number '" + cells[k] + "'");
      return v;
    };
    ReportRow row;
    row.index.resize(r);
    for (int k = 0; k < r; ++k) row.index[k] = std::stoll(cells[k]);
    row.target.resize(d);
    row.anchor.resize(d);
    row.u.resize(d);
    for (int k = 0; k < d; ++k) {
      row.target[k] = num(r + k);
      row.anchor[k] = num(r + d + k);
      row.u[k] = num(r + 2 * d + k);
    }
    row.residual = num(r + 3 * d);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

json constants_object(const RunConstants& c) {
  json j;
  j["B"] = c.b;
  j["R_V"] = c.domain_radius;
  j["K_V"] = c.inverse_bound;
  j["epsilon_prime"] = c.epsilon_prime;
  j["lambda_star"] = c.lambda_star;
  j["N"] = c.n_threshold ? json(*c.n_threshold) : json(nullptr);
  j["r_Z"] = c.covering_radius_z;
  return j;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

json ivec_json(const IVec& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

}  // namespace

std::string constants_json(const RunConstants& c) { return constants_object(c).dump(2) + "\n"; }

std::string summary_json(const EquilibriumReport& report, const InteractionModel& model,
                         const RunConstants& constants, const VerificationSummary& verification) {
  json j;
  if (report.mode.is_scaled()) {
    j["mode"] = "scaled";
    j["n"] = report.mode.n;
  } else {
    j["mode"] = "magnified";
    j["lambda"] = report.mode.lambda;
  }
  j["constants"] = constants_object(constants);
  j["residual_sup"] = report.residual_sup;
  j["anchor_distance"] = report.anchor_distance;
  j["type_deviation"] = report.type_deviation;
  j["rho_empirical"] = report.rho_empirical;
  j["iterations"] = report.iterations;
  j["delta_trace"] = report.delta_trace;
  j["eta"] = report.coding.eta;
  j["coding_deviation"] = report.coding.deviation;
  j["interior_size"] = model.domain().interior_size();
  json clauses = json::array();
  for (const auto& c : verification.clauses)
    clauses.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound},
                       {"detail", c.detail}});
  j["clauses"] = clauses;
  j["verified"] = verification.passed();
  json collar = json::array();
  const auto& domain = model.domain();
  for (std::size_t s = domain.interior_size(); s < domain.size(); ++s)
    collar.push_back({{"index", ivec_json(domain.index(s))}, {"u", vec_json(report.u[s])}});
  j["collar"] = collar;
  return j.dump(2) + "\n";
}

}  // namespace fkq
