#include "commands.hpp"

#include "config.hpp"
#include "pipeline.hpp"

#include "fkq/errors.hpp"
#include "fkq/report_io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#ifndef FKQ_DEFAULT_CONFIG_DIR
#define FKQ_DEFAULT_CONFIG_DIR "configs"
#endif

namespace fkq::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "pipeline config (JSON)");
  app->add_option("--preset", c.preset, "named config from the configs directory");
  app->add_option("--out-dir", c.out_dir, "output directory (overrides output.dir)");
  app->add_option("--seed", c.seed, "random seed for verification probes");
  app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

std::string preset_path(const std::string& name) {
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("FKQ_CONFIG_DIR")) dirs.emplace_back(env);
  dirs.emplace_back(FKQ_DEFAULT_CONFIG_DIR);
  dirs.emplace_back("configs");
  for (const auto& d : dirs) {
    const auto p = d / (name + ".json");
    if (fs::exists(p)) return p.string();
  }
  throw ConfigError("unknown preset '" + name + "'");
}

PipelineConfig resolve(const Common& c) {
  if (c.config.empty() == c.preset.empty()) throw ConfigError("give exactly one of --config or --preset");
  PipelineConfig cfg = load_config(c.config.empty() ? preset_path(c.preset) : c.config);
  if (!c.out_dir.empty()) cfg.output.dir = c.out_dir;
  if (c.seed) cfg.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  return cfg;
}

fs::path out_path(const PipelineConfig& cfg, const std::string& file) {
  fs::create_directories(cfg.output.dir);
  return fs::path(cfg.output.dir) / file;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

int cmd_generate(const Common& c, std::ostream& out) {
  Pipeline p(resolve(c));
  const auto set = p.pointset();
  if (!set) throw ConfigError("generate: the config has no pointset section");
  const auto path = out_path(p.config(), p.config().output.points);
  std::ofstream f(path);
  write_points_csv(f, set->points());
  out << "generate: " << set->size() << " points, packing " << format_double(set->packing_radius())
      << ", covering " << format_double(set->covering_radius()) << " -> " << path.string() << "\n";
  return kOk;
}

int cmd_atlas(const Common& c, std::ostream& out) {
  Pipeline p(resolve(c));
  auto& atlas = p.atlas();
  const auto constants = p.constants();
  {
    std::ofstream f(out_path(p.config(), p.config().output.atlas));
    write_atlas_csv(f, atlas);
  }
  write_file(out_path(p.config(), p.config().output.constants), constants_json(constants));
  out << "atlas: " << atlas.size() << " critical points, r_Z " << format_double(atlas.covering_radius())
      << ", R_V " << format_double(constants.domain_radius) << ", K_V " << format_double(constants.inverse_bound)
      << "\n";
  return kOk;
}

int cmd_solve(const Common& c, std::ostream& out, std::ostream& err) {
  Pipeline p(resolve(c));
  const auto outcome = p.run();
  const auto& cfg = p.config();
  {
    std::ofstream f(out_path(cfg, cfg.output.report));
    write_report_csv(f, outcome.report, p.model());
  }
  write_file(out_path(cfg, cfg.output.summary),
             summary_json(outcome.report, p.model(), outcome.constants, outcome.verification));
  write_file(out_path(cfg, cfg.output.constants), constants_json(outcome.constants));
  out << "solve: " << outcome.report.iterations << " sweeps, residual_sup "
      << format_double(outcome.report.residual_sup) << ", rho " << format_double(outcome.report.rho_empirical)
      << "\n";
  if (const auto* f = outcome.verification.first_failure()) {
    err << "verification failed: " << f->name << " (value " << format_double(f->value) << ", bound "
        << format_double(f->bound) << "; " << f->detail << ")\n";
    return kVerificationFailure;
  }
  return kOk;
}

int cmd_verify(const Common& c, std::string report, std::string summary, std::ostream& out, std::ostream& err) {
  Pipeline p(resolve(c));
  const auto& cfg = p.config();
  if (report.empty()) report = (fs::path(cfg.output.dir) / cfg.output.report).string();
  if (summary.empty()) summary = (fs::path(cfg.output.dir) / cfg.output.summary).string();
  if (!fs::exists(report)) throw ConfigError(report + ": no such file");
  const json sj = parse_json_file(summary);
  std::ifstream rin(report);
  const auto rows = read_report_csv(rin);

  auto fail = [&](const std::string& clause, const std::string& why) {
    err << "verify: " << clause << " clause violated: " << why << "\n";
    return kVerificationFailure;
  };

  const auto& model = p.model();
  const auto& domain = model.domain();
  Configuration u(domain.size(), Vec::Zero(model.value_dim()));
  std::vector<bool> seen(domain.size(), false);
  if (rows.size() != domain.interior_size()) return fail("structure", "row count does not match the domain");
  for (const auto& row : rows) {
    const auto s = domain.find(row.index);
    if (!s || !domain.is_interior(*s) || seen[*s]) return fail("structure", "unexpected index in report");
    if (row.u.size() != model.value_dim()) return fail("structure", "value dimension mismatch");
    seen[*s] = true;
    u[*s] = row.u;
  }
  try {
    for (const auto& entry : sj.at("collar")) {
      IVec i(static_cast<Eigen::Index>(entry.at("index").size()));
      for (std::size_t k = 0; k < entry.at("index").size(); ++k)
        i[static_cast<Eigen::Index>(k)] = entry.at("index")[k].get<std::int64_t>();
      const auto s = domain.find(i);
      if (!s || domain.is_interior(*s)) return fail("structure", "unexpected collar index");
      Vec v(static_cast<Eigen::Index>(entry.at("u").size()));
      for (std::size_t k = 0; k < entry.at("u").size(); ++k) v[static_cast<Eigen::Index>(k)] = entry.at("u")[k].get<double>();
      u[*s] = v;
      seen[*s] = true;
    }
  } catch (const json::exception& e) {
    throw ConfigError(summary + ": " + e.what());
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) return fail("structure", "missing collar values");

  SolveMode mode;
  double recorded = 0.0;
  try {
    if (sj.at("mode").get<std::string>() == "scaled")
      mode = SolveMode::scaled(sj.at("n").get<int>(), cfg.potential.scale_matrix);
    else
      mode = SolveMode::magnified(sj.at("lambda").get<double>());
    recorded = sj.at("residual_sup").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(summary + ": " + e.what());
  }
  double sup = 0.0;
  for (double r : residuals(model, *p.potential(), mode, u)) sup = std::max(sup, r);
  if (!(std::abs(sup - recorded) <= 1e-12))
    return fail("residual", "recomputed residual_sup " + format_double(sup) + " differs from recorded " +
                                format_double(recorded));
  for (const auto& cl : sj.at("clauses"))
    if (!cl.at("passed").get<bool>()) return fail(cl.at("name").get<std::string>(), cl.at("detail").get<std::string>());
  out << "verify: ok (residual_sup " << format_double(sup) << ")\n";
  return kOk;
}

int cmd_export(const Common& c, std::string report, std::string summary, std::ostream& out) {
  const PipelineConfig cfg = resolve(c);
  if (report.empty()) report = (fs::path(cfg.output.dir) / cfg.output.report).string();
  if (summary.empty()) summary = (fs::path(cfg.output.dir) / cfg.output.summary).string();
  std::ifstream rin(report);
  if (!rin) throw ConfigError(report + ": cannot open file");
  const auto rows = read_report_csv(rin);
  const json sj = parse_json_file(summary);
  if (rows.empty()) throw ConfigError(report + ": no rows");
  const auto d = rows.front().u.size();
  {
    std::ofstream f(out_path(cfg, "plot_points.csv"));
    for (Eigen::Index k = 0; k < d; ++k) f << "target" << k << ',';
    for (Eigen::Index k = 0; k < d; ++k) f << (k ? ",u" : "u") << k;
    f << '\n';
    for (const auto& r : rows) {
      for (Eigen::Index k = 0; k < d; ++k) f << format_double(r.target[k]) << ',';
      for (Eigen::Index k = 0; k < d; ++k) f << (k ? "," : "") << format_double(r.u[k]);
      f << '\n';
    }
  }
  {
    std::ofstream f(out_path(cfg, "residuals.csv"));
    f << "row,residual\n";
    for (std::size_t k = 0; k < rows.size(); ++k) f << k << ',' << format_double(rows[k].residual) << '\n';
  }
  {
    std::ofstream f(out_path(cfg, "delta_trace.csv"));
    f << "sweep,delta\n";
    std::size_t k = 0;
    for (const auto& v : sj.at("delta_trace")) f << ++k << ',' << format_double(v.get<double>()) << '\n';
  }
  out << "export-plot-data: wrote plot_points.csv, residuals.csv, delta_trace.csv to " << cfg.output.dir << "\n";
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria of pattern-equivariant Frenkel-Kontorova models", "fkq"};
  app.require_subcommand(1);
  Common common;
  std::string report, summary;

  auto* gen = app.add_subcommand("generate", "build the point set and write it as CSV");
  add_common(gen, common);
  auto* atl = app.add_subcommand("atlas", "critical points and landscape constants");
  add_common(atl, common);
  auto* sol = app.add_subcommand("solve", "full pipeline: atlas, coding, solve, verify, export");
  add_common(sol, common);
  sol->alias("run");
  auto* ver = app.add_subcommand("verify", "recheck a report against its summary and config");
  add_common(ver, common);
  ver->add_option("--report", report, "report CSV");
  ver->add_option("--summary", summary, "summary JSON");
  auto* exp = app.add_subcommand("export-plot-data", "emit (target, u) pairs and residual series");
  add_common(exp, common);
  exp->add_option("--report", report, "report CSV");
  exp->add_option("--summary", summary, "summary JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "fkq: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (gen->parsed()) return cmd_generate(common, out);
    if (atl->parsed()) return cmd_atlas(common, out);
    if (sol->parsed()) return cmd_solve(common, out, err);
    if (ver->parsed()) return cmd_verify(common, report, summary, out, err);
    if (exp->parsed()) return cmd_export(common, report, summary, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const VerificationFailure& e) {
    err << e.what() << "\n";
    return kVerificationFailure;
  } catch (const NonConvergenceError& e) {
    err << e.what() << "\n";
    return kNonConvergence;
  } catch (const DomainBreachError& e) {
    err << e.what() << "\n";
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOtherError;
  }
  return kOtherError;
}

}  // namespace fkq::cli
