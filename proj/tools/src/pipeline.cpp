#include "pipeline.hpp"

#include "fkq/errors.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

namespace fkq::cli {

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {}

Mat Pipeline::sigma() {
  if (config_.type.sigma) return *config_.type.sigma;
  if (config_.interaction.family != "address_neighborhood")
    throw ConfigError(config_.source + ": type.sigma = \"psi\" needs the address_neighborhood family");
  model();
  return addresses_->projection.transpose();
}

std::optional<Mat> Pipeline::scale_matrix() {
  if (config_.potential.scale_matrix) return config_.potential.scale_matrix;
  const auto set = pointset();
  if (set && set->self_affinity()) return *set->self_affinity();
  return std::nullopt;
}

// Bounding box of the targets sigma^T i over every slot of a lattice-family
// domain (before any pointset exists).
Region Pipeline::target_box() {
  const auto& in = config_.interaction;
  const Mat s = *config_.type.sigma;
  if (s.rows() != in.lo.size())
    throw ConfigError(config_.source + ": type.sigma must have one row per index coordinate");
  Vec lo = Vec::Constant(s.cols(), std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  const int r = static_cast<int>(in.lo.size());
  // sigma^T i is linear, so the corners of the window grown by the collar
  // width (1) bound every target.
  for (int mask = 0; mask < (1 << r); ++mask) {
    IVec i(r);
    for (int k = 0; k < r; ++k) i[k] = (mask >> k) & 1 ? in.hi[k] + 1 : in.lo[k] - 1;
    const Vec t = s.transpose() * to_vec(i);
    lo = lo.cwiseMin(t);
    hi = hi.cwiseMax(t);
  }
  return Region::box(lo, hi);
}

std::shared_ptr<const DeloneSet> Pipeline::pointset() {
  if (set_built_) return set_;
  set_built_ = true;
  if (!config_.pointset) return set_;
  const auto& ps = *config_.pointset;
  Region extent = Region::box(Vec::Zero(1), Vec::Ones(1));
  if (ps.extent.region) {
    extent = *ps.extent.region;
  } else if (ps.kind != "csv") {
    if (config_.interaction.family == "address_neighborhood") {
      extent = config_.interaction.physical_window->expanded(ps.extent.margin);
    } else {
      if (!config_.type.sigma)
        throw ConfigError(config_.source + ": pointset.extent \"auto\" needs an explicit type.sigma");
      Region box = target_box();
      if (config_.mode.kind == ModeSpec::Kind::scaled) {
        if (!config_.mode.n)
          throw ConfigError(config_.source + ": pointset.extent \"auto\" in scaled mode needs an explicit mode.n");
        const double a = ps.kind == "fibonacci" ? kGoldenRatio : ps.kind == "ammann-beenker" ? 1.0 + std::sqrt(2.0) : 1.0;
        box = box.transformed(std::pow(a, *config_.mode.n) * Mat(Mat::Identity(box.dim(), box.dim())));
      }
      extent = box.expanded(ps.extent.margin);
    }
  }
  if (ps.kind == "periodic") {
    set_ = std::make_shared<const DeloneSet>(build_periodic(ps.dim, ps.spacing, extent));
  } else if (ps.kind == "fibonacci" || ps.kind == "ammann-beenker") {
    if (extent.dim() != (ps.kind == "fibonacci" ? 1 : 2))
      throw ConfigError(config_.source + ": pointset extent has the wrong dimension for " + ps.kind);
    set_ = std::make_shared<const DeloneSet>(build_cut_and_project(ps.kind, extent));
  } else {
    std::ifstream in(ps.path);
    if (!in) throw ConfigError(ps.path + ": cannot open point file");
    set_ = std::make_shared<const DeloneSet>(
        import_points_csv(in, ps.extent.region ? std::optional<Region>(*ps.extent.region) : std::nullopt));
  }
  return set_;
}

std::shared_ptr<const PatternPotential> Pipeline::potential() {
  if (potential_) return potential_;
  const auto& p = config_.potential;
  if (p.kind == "one_minus_cos") {
    potential_ = std::make_shared<const PatternPotential>(PatternPotential::periodic(p.kind, p.dim));
  } else {
    auto set = pointset();
    potential_ = std::make_shared<const PatternPotential>(
        PatternPotential::bump(set, p.amplitude, p.support.value_or(set->packing_radius()), p.sign));
  }
  return potential_;
}

const InteractionModel& Pipeline::model() {
  if (model_) return *model_;
  const auto& in = config_.interaction;
  const int d = potential()->dim();
  if (in.family == "nn_quadratic_1d") {
    model_ = InteractionModel::nn_quadratic_1d(in.lo[0], in.hi[0], d);
  } else if (in.family == "p_power_1d") {
    if (d != 1) throw ConfigError(config_.source + ": p_power_1d needs a one-dimensional potential");
    model_ = InteractionModel::p_power_1d(in.p, in.lo[0], in.hi[0]);
  } else if (in.family == "laplacian_quadratic") {
    model_ = InteractionModel::laplacian_quadratic(in.lo, in.hi, d);
  } else if (in.family == "potential_only") {
    std::vector<IVec> interior;
    IVec i = in.lo;
    const auto r = in.lo.size();
    while (true) {
      interior.push_back(i);
      auto k = r - 1;
      for (; k >= 0; --k) {
        if (++i[k] <= in.hi[k]) break;
        i[k] = in.lo[k];
      }
      if (k < 0) break;
    }
    model_ = InteractionModel::potential_only(static_cast<int>(r), std::move(interior), d);
  } else {
    const auto set = pointset();
    if (!set) throw ConfigError(config_.source + ": address_neighborhood needs a pointset");
    addresses_ = address_map(*set);
    std::vector<IVec> interior;
    for (std::size_t k = 0; k < set->size(); ++k)
      if (in.physical_window->contains(set->point(k))) interior.push_back(addresses_->addresses[k]);
    if (interior.empty()) throw ConfigError(config_.source + ": interaction window contains no set point");
    model_ = InteractionModel::address_neighborhood(in.tau, addresses_->addresses, interior, d);
  }
  return *model_;
}

CriticalAtlas& Pipeline::atlas() {
  if (atlas_) return *atlas_;
  auto p = potential();
  const auto& as = config_.atlas;
  Region region = Region::box(Vec::Zero(1), Vec::Ones(1));
  if (as.region) {
    region = *as.region;
  } else if (p->kind() == PotentialKind::bump_sum) {
    region = p->base_set()->extent();
  } else {
    if (config_.interaction.family == "address_neighborhood")
      throw ConfigError(config_.source + ": atlas.region is required for this combination");
    model();
    const Mat s = sigma();
    Vec lo = Vec::Constant(s.cols(), std::numeric_limits<double>::infinity());
    Vec hi = -lo;
    for (const auto& i : model().domain().indices()) {
      const Vec t = s.transpose() * to_vec(i);
      lo = lo.cwiseMin(t);
      hi = hi.cwiseMax(t);
    }
    region = Region::box(lo, hi);
    if (config_.mode.kind == ModeSpec::Kind::scaled) {
      const auto a = scale_matrix();
      if (!a || !config_.mode.n)
        throw ConfigError(config_.source + ": scaled mode on a periodic potential needs atlas.region or "
                          "potential.scale_matrix with an explicit mode.n");
      Mat an = Mat::Identity(a->rows(), a->cols());
      for (int k = 0; k < *config_.mode.n; ++k) an = *a * an;
      region = region.transformed(an);
    }
    region = region.expanded(as.margin);
  }
  // Finer in 1D, where the seeds are cheap and the inflection points of
  // periodic potentials sit close to the critical points.
  const double step = as.grid_step.value_or(p->equivariance_range() / (p->dim() == 1 ? 8.0 : 4.0));
  AtlasOptions opts;
  opts.threads = config_.threads;
  CriticalAtlas all = find_critical_points(p, region, step, config_.tolerances.atlas_tol, opts);
  const CriticalKind kind = as.select == "minima" ? CriticalKind::minima
                            : as.select == "maxima" ? CriticalKind::maxima
                                                    : CriticalKind::all;
  atlas_.emplace(all.select(kind));
  estimate_constants(*atlas_, as.probe_count, config_.threads);
  return *atlas_;
}

TypeSpec Pipeline::type_spec() {
  TypeSpec t;
  t.sigma = sigma();
  t.radius = config_.type.radius ? *config_.type.radius : 2.0 * atlas().covering_radius();
  return t;
}

RunConstants Pipeline::constants() {
  if (constants_) return *constants_;
  const auto& at = atlas();
  RunConstants c;
  c.b = model().hessian_bound(type_spec());
  c.domain_radius = at.constants().domain_radius;
  c.inverse_bound = at.constants().inverse_bound;
  c.epsilon_prime = at.constants().epsilon_prime;
  c.covering_radius_z = at.covering_radius();
  if (c.b > 0.0) {
    const auto th = thresholds(c.b, c.domain_radius, scale_matrix());
    c.lambda_star = th.lambda_star;
    c.n_threshold = th.n;
  } else {
    c.lambda_star = 0.0;
    if (scale_matrix()) c.n_threshold = 0;
  }
  constants_ = c;
  return c;
}

SolveMode Pipeline::mode() {
  const auto& m = config_.mode;
  switch (m.kind) {
    case ModeSpec::Kind::magnified:
      return SolveMode::magnified(m.lambda);
    case ModeSpec::Kind::automatic: {
      const auto c = constants();
      if (!(c.lambda_star > 0.0)) throw ConfigError(config_.source + ": mode auto needs B > 0");
      return SolveMode::magnified(m.multiplier * c.lambda_star);
    }
    case ModeSpec::Kind::scaled: {
      const auto a = scale_matrix();
      if (!a) throw ConfigError(config_.source + ": scaled mode needs a self-affine set or potential.scale_matrix");
      int n = 0;
      if (m.n) {
        n = *m.n;
      } else {
        n = *constants().n_threshold + 1;
      }
      return SolveMode::scaled(n, config_.potential.scale_matrix);
    }
  }
  return {};
}

Pipeline::Outcome Pipeline::run() {
  const auto c = constants();
  const SolveMode md = mode();
  if (!md.is_scaled() && md.lambda <= c.lambda_star)
    std::cerr << "warning: lambda " << md.lambda << " does not exceed lambda_* = " << c.lambda_star << "\n";
  if (md.is_scaled() && c.n_threshold && md.n <= *c.n_threshold)
    std::cerr << "warning: n " << md.n << " does not exceed N = " << *c.n_threshold << "\n";
  const auto spec = type_spec();
  const auto coding = build_coding(atlas(), spec, model(), md);
  SolveOptions so;
  so.tol = config_.tolerances.tol;
  so.max_iter = config_.tolerances.max_iter;
  so.residual_tol = config_.tolerances.residual_tol;
  so.threads = config_.threads;
  Outcome out;
  out.constants = c;
  out.report = solve(model(), atlas(), coding, md, so);
  VerifyOptions vo;
  vo.probes = config_.verify.probes;
  vo.amplitude = config_.verify.amplitude;
  vo.seed = config_.seed;
  out.verification = verify(out.report, model(), atlas(), c.b, so, vo);
  return out;
}

}  // namespace fkq::cli
