#include "fkq/solver.hpp"

#include "fkq/errors.hpp"
#include "fkq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>

namespace fkq {

namespace {

Mat matrix_power(const Mat& a, int n) {
  Mat out = Mat::Identity(a.rows(), a.cols());
  for (int k = 0; k < n; ++k) out = a * out;
  return out;
}

Mat scale_matrix(const CriticalAtlas& atlas, const SolveMode& mode) {
  const Mat a = mode.a ? *mode.a : atlas.potential().scale_matrix();
  smallest_expansion(a);
  return a;
}

double interior_sup(const Configuration& u, const Configuration& v, std::size_t interior) {
  double worst = 0.0;
  for (std::size_t s = 0; s < interior; ++s) worst = std::max(worst, (u[s] - v[s]).norm());
  return worst;
}

}  // namespace

double smallest_expansion(const Mat& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw PreconditionError("scale matrix must be square");
  Eigen::MatrixXd m = a;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  double smallest = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    smallest = std::min(smallest, std::abs(es.eigenvalues()[k]));
  if (!(smallest > 1.0)) throw PreconditionError("scale matrix is not expanding");
  return smallest;
}

Thresholds thresholds(double b, double domain_radius, const std::optional<Mat>& a) {
  if (!(b > 0.0) || !(domain_radius > 0.0)) throw PreconditionError("thresholds: B and R_V must be > 0");
  Thresholds t;
  t.lambda_star = b / domain_radius;
  if (a) {
    const double ld = smallest_expansion(*a);
    t.n = std::max(0, static_cast<int>(std::ceil(std::log(t.lambda_star) / std::log(ld))));
  }
  return t;
}

// --- Coding -----------------------------------------------------------------

CodingConfiguration build_coding(const CriticalAtlas& atlas, const TypeSpec& spec,
                                 const InteractionModel& model, const SolveMode& mode) {
  spec.validate(model.rank(), model.value_dim());
  if (atlas.potential().dim() != model.value_dim())
    throw ConfigError("coding: potential dimension does not match the configuration dimension");
  const auto& domain = model.domain();

  std::optional<CriticalAtlas> scaled;
  Mat an;
  if (mode.is_scaled()) {
    if (mode.n < 0) throw PreconditionError("coding: scale power must be >= 0");
    const Mat a = scale_matrix(atlas, mode);
    an = matrix_power(a, mode.n);
    scaled.emplace(atlas.scaled(mode.n, mode.a));
  }
  const CriticalAtlas& source = scaled ? *scaled : atlas;
  const double rz = source.covering_radius();
  if (spec.radius < 2.0 * rz * (1.0 - 1e-9)) {
    std::ostringstream msg;
    msg << "coding: type radius " << spec.radius << " is below 2 r_Z = " << 2.0 * rz;
    throw InfeasibleTypeError(msg.str());
  }

  CodingConfiguration c;
  c.spec = spec;
  c.scale_power = mode.is_scaled() ? mode.n : 0;
  c.anchors.resize(domain.size());
  c.atlas_index.resize(domain.size());
  for (std::size_t s = 0; s < domain.size(); ++s) {
    const Vec t = spec.target(domain.index(s));
    if (!source.region().contains(t)) throw CoverageError("coding: target outside the atlas region");
    const std::size_t k = source.nearest(t);
    const Vec& a = source.point(k).z;
    const double dev = (a - t).norm();
    if (dev > 2.0 * rz * (1.0 + 1e-12)) throw CoverageError("coding: atlas does not cover the target");
    c.anchors[s] = a;
    if (scaled) {
      const Vec y = an * a;
      const auto base = atlas.find(y, 1e-9 * std::max(1.0, y.norm()));
      if (!base) throw NumericalError("coding: scaled anchor has no base atlas point");
      c.atlas_index[s] = *base;
    } else {
      c.atlas_index[s] = k;
    }
    if (domain.is_interior(s)) c.deviation = std::max(c.deviation, dev);
  }
  for (std::size_t s = 0; s < domain.interior_size(); ++s)
    c.eta = std::max(c.eta, model.grad_at(c.anchors, s).norm());
  return c;
}

CodingConfiguration recode(const CodingConfiguration& coding, const CriticalAtlas& atlas,
                           const InteractionModel& model, int n, const std::optional<Mat>& a) {
  if (n < 0) throw PreconditionError("recode: scale power must be >= 0");
  const Mat an = matrix_power(a ? *a : atlas.potential().scale_matrix(), n);
  CodingConfiguration c = coding;
  c.scale_power = n;
  for (std::size_t s = 0; s < c.anchors.size(); ++s) {
    const Vec y = an * c.anchors[s];
    const auto k = atlas.find(y, 1e-9 * std::max(1.0, y.norm()));
    if (!k) throw CoverageError("recode: anchor is not in A^{-n} Z_V");
    c.atlas_index[s] = *k;
  }
  (void)model;
  return c;
}

// --- Iteration --------------------------------------------------------------

Configuration apply_map(const InteractionModel& model, const CriticalAtlas& atlas,
                        const CodingConfiguration& coding, const SolveMode& mode,
                        const Configuration& u, int threads) {
  const auto& p = atlas.potential();
  const double rv = atlas.constants().domain_radius;
  const std::size_t interior = model.domain().interior_size();
  Mat an, an_inv;
  Eigen::FullPivLU<Mat> ant;
  if (mode.is_scaled()) {
    an = matrix_power(scale_matrix(atlas, mode), mode.n);
    an_inv = an.inverse();
    ant.compute(an.transpose());
  }

  Configuration next = u;
  std::vector<std::exception_ptr> failures(interior);
  parallel_for(interior, threads, [&](std::size_t s) {
    try {
      const Vec q = model.grad_at(u, s);
      const Vec w = mode.is_scaled() ? Vec(ant.solve(-q)) : Vec(-q / mode.lambda);
      if (w.norm() > rv) {
        std::ostringstream msg;
        msg << "solve: |w| = " << w.norm() << " exceeds R_V = " << rv << " at slot " << s;
        throw DomainBreachError(msg.str());
      }
      const Vec x = local_inverse(p, atlas.point(coding.atlas_index[s]).z, w, rv, 1e-15);
      next[s] = mode.is_scaled() ? Vec(an_inv * x) : x;
    } catch (...) {
      failures[s] = std::current_exception();
    }
  });
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  for (std::size_t s = interior; s < next.size(); ++s) next[s] = coding.anchors[s];
  return next;
}

std::vector<double> residuals(const InteractionModel& model, const PatternPotential& base,
                              const SolveMode& mode, const Configuration& u) {
  std::optional<PatternPotential> scaled;
  if (mode.is_scaled()) scaled.emplace(base.scaled(mode.n, mode.a));
  const PatternPotential& p = scaled ? *scaled : base;
  const double factor = mode.is_scaled() ? 1.0 : mode.lambda;
  std::vector<double> out(model.domain().interior_size());
  for (std::size_t s = 0; s < out.size(); ++s)
    out[s] = (model.grad_at(u, s) + factor * p.eval(u[s]).gradient).norm();
  return out;
}

EquilibriumReport solve(const InteractionModel& model, const CriticalAtlas& atlas,
                        const CodingConfiguration& coding, const SolveMode& mode,
                        const SolveOptions& options, const Configuration* start) {
  if (coding.anchors.size() != model.domain().size())
    throw PreconditionError("solve: coding does not match the interaction domain");
  if (!atlas.has_constants()) throw PreconditionError("solve: atlas constants have not been estimated");
  if (mode.is_scaled()) {
    if (mode.n != coding.scale_power) throw PreconditionError("solve: coding was built for another scale power");
    if (atlas.potential().scale_power() != 0) throw PreconditionError("solve: scaled mode needs the unscaled atlas");
  } else if (!(mode.lambda > 0.0)) {
    throw PreconditionError("solve: lambda must be > 0");
  }
  if (!(options.tol > 0.0) || options.max_iter < 1) throw PreconditionError("solve: bad tolerance or iteration cap");

  const std::size_t interior = model.domain().interior_size();
  EquilibriumReport r;
  r.mode = mode;
  r.coding = coding;
  r.u = start ? *start : coding.anchors;
  if (r.u.size() != coding.anchors.size()) throw PreconditionError("solve: start does not match the domain");
  for (std::size_t s = interior; s < r.u.size(); ++s) r.u[s] = coding.anchors[s];

  bool converged = false;
  while (r.iterations < options.max_iter) {
    Configuration next = apply_map(model, atlas, coding, mode, r.u, options.threads);
    ++r.iterations;
    const double delta = interior_sup(next, r.u, interior);
    r.delta_trace.push_back(delta);
    r.u = std::move(next);
    if (delta < options.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "solve: no convergence after " << r.iterations << " sweeps (last delta "
        << r.delta_trace.back() << ")";
    throw NonConvergenceError(msg.str());
  }

  double umax = 1.0;
  for (const auto& v : r.u) umax = std::max(umax, v.cwiseAbs().maxCoeff());
  const double noise = 256.0 * std::numeric_limits<double>::epsilon() * umax;
  for (std::size_t k = 3; k < r.delta_trace.size(); ++k)
    if (r.delta_trace[k] > noise && r.delta_trace[k - 1] > noise)
      r.rho_empirical = std::max(r.rho_empirical, r.delta_trace[k] / r.delta_trace[k - 1]);

  r.residuals = residuals(model, atlas.potential(), mode, r.u);
  for (double v : r.residuals) r.residual_sup = std::max(r.residual_sup, v);
  for (std::size_t s = 0; s < interior; ++s) {
    r.anchor_distance = std::max(r.anchor_distance, (r.u[s] - coding.anchors[s]).norm());
    r.type_deviation = std::max(r.type_deviation,
                                (r.u[s] - coding.spec.target(model.domain().index(s))).norm());
  }
  return r;
}

// --- Verification -----------------------------------------------------------

bool VerificationSummary::passed() const { return first_failure() == nullptr; }

const ClauseResult* VerificationSummary::first_failure() const {
  for (const auto& c : clauses)
    if (!c.passed) return &c;
  return nullptr;
}

void VerificationSummary::require() const {
  if (const auto* f = first_failure())
    throw VerificationFailure(f->name, "verification failed: " + f->name + " (" + f->detail + ")");
}

VerificationSummary verify(const EquilibriumReport& report, const InteractionModel& model,
                           const CriticalAtlas& atlas, double b, const SolveOptions& solve_options,
                           const VerifyOptions& options) {
  VerificationSummary v;
  const auto& k = atlas.constants();
  const std::size_t interior = model.domain().interior_size();
  auto add = [&](std::string name, bool ok, double value, double bound, std::string detail) {
    v.clauses.push_back({std::move(name), ok, value, bound, std::move(detail)});
  };

  {
    double sup = 0.0;
    for (double x : residuals(model, atlas.potential(), report.mode, report.u)) sup = std::max(sup, x);
    add("residual", sup <= solve_options.residual_tol, sup, solve_options.residual_tol,
        "sup residual of the equilibrium equation");
  }
  {
    const double bound = report.coding.spec.radius + k.epsilon_prime;
    add("type_bound", report.type_deviation <= bound, report.type_deviation, bound,
        "sup |u_i - sigma^T i| <= R + eps'");
  }
  {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(-options.amplitude, options.amplitude);
    double worst = 0.0;
    std::string detail = "perturbed starts reach the same fixed point";
    bool ok = true;
    for (int probe = 0; probe < options.probes && ok; ++probe) {
      Configuration start = report.coding.anchors;
      for (std::size_t s = 0; s < interior; ++s)
        for (Eigen::Index a = 0; a < start[s].size(); ++a) start[s][a] += unif(rng);
      try {
        const auto other = solve(model, atlas, report.coding, report.mode, solve_options, &start);
        worst = std::max(worst, sup_norm(other.u, report.u));
      } catch (const Error& e) {
        ok = false;
        detail = std::string("perturbed start failed: ") + e.what();
      }
    }
    const double bound = 10.0 * solve_options.tol;
    add("uniqueness", ok && worst <= bound, worst, bound, detail);
  }
  {
    double bound = 1.1 * k.inverse_bound * b;
    if (report.mode.is_scaled()) {
      const double ld = smallest_expansion(report.mode.a ? *report.mode.a : atlas.potential().scale_matrix());
      bound *= std::pow(ld, -2.0 * report.mode.n);
    } else {
      bound /= report.mode.lambda;
    }
    add("contraction", report.rho_empirical <= bound, report.rho_empirical, bound,
        "empirical contraction rate within the predicted bound");
  }
  {
    const double bound = report.coding.deviation + report.anchor_distance;
    add("type_preservation", report.type_deviation <= bound * (1.0 + 1e-12) + 1e-15,
        report.type_deviation, bound, "type deviation <= coding deviation + anchor distance");
  }
  {
    double moved = std::numeric_limits<double>::infinity();
    std::string detail = "one more application of the map stays within tol";
    try {
      const auto next = apply_map(model, atlas, report.coding, report.mode, report.u, solve_options.threads);
      moved = interior_sup(next, report.u, interior);
    } catch (const Error& e) {
      detail = e.what();
    }
    add("fixed_point", moved <= solve_options.tol, moved, solve_options.tol, detail);
  }
  return v;
}

}  // namespace fkq
