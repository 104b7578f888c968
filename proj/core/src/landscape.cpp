#include "fkq/landscape.hpp"

#include "fkq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <unordered_map>

namespace fkq {

NewtonResult newton_gradient(const PatternPotential& p, const Vec& x0, const Vec& y, double tol,
                             double max_radius, int max_iter) {
  NewtonResult out;
  out.x = x0;
  FieldSample s = p.eval(out.x);
  Vec r = s.gradient - y;
  out.residual = r.norm();
  for (; out.iterations < max_iter; ++out.iterations) {
    if (out.residual < tol) {
      out.converged = true;
      return out;
    }
    Eigen::FullPivLU<Mat> lu(s.hessian);
    if (!lu.isInvertible()) return out;
    const Vec dx = -lu.solve(r);
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 50; ++halving, t *= 0.5) {
      const Vec xn = out.x + t * dx;
      if ((xn - x0).norm() > max_radius) continue;
      FieldSample sn = p.eval(xn);
      Vec rn = sn.gradient - y;
      const double rnn = rn.norm();
      if (rnn < out.residual) {
        out.x = xn;
        s = std::move(sn);
        r = std::move(rn);
        out.residual = rnn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No step decreases the residual: accept only if we are at round-off.
      const double floor = 16.0 * std::numeric_limits<double>::epsilon() *
                           (1.0 + out.x.norm()) * std::max(1.0, s.hessian.norm()) *
                           std::max(1.0, y.norm());
      out.converged = out.residual <= floor;
      return out;
    }
  }
  out.converged = out.residual < tol;
  return out;
}

// --- CriticalAtlas ----------------------------------------------------------

CriticalAtlas::CriticalAtlas(std::shared_ptr<const PatternPotential> potential, Region region,
                             std::vector<CriticalPoint> points)
    : potential_(std::move(potential)), region_(std::move(region)), points_(std::move(points)) {
  if (points_.empty()) throw DegeneratePotentialError("atlas: no non-degenerate critical point in region");
  std::sort(points_.begin(), points_.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return lex_less(a.z, b.z); });
  const auto pos = positions();
  const auto d = static_cast<std::size_t>(region_.dim());
  if (pos.size() < d + 2)
    throw DegeneratePotentialError("atlas: too few critical points to cover the region");
  covering_ = compute_radii(pos, region_).covering;
  index_ = std::make_shared<const SpatialHash>(pos, covering_ > 0.0 ? covering_ : 1.0);
}

std::vector<Vec> CriticalAtlas::positions() const {
  std::vector<Vec> out;
  out.reserve(points_.size());
  for (const auto& c : points_) out.push_back(c.z);
  return out;
}

std::size_t CriticalAtlas::nearest(const Vec& x) const { return *index_->nearest(x); }

std::optional<std::size_t> CriticalAtlas::find(const Vec& x, double tol) const {
  const auto k = index_->nearest(x);
  if (k && (points_[*k].z - x).norm() <= tol) return k;
  return std::nullopt;
}

const LandscapeConstants& CriticalAtlas::constants() const {
  if (!constants_) throw PreconditionError("atlas: constants have not been estimated");
  return *constants_;
}

void CriticalAtlas::set_constants(const LandscapeConstants& c, std::vector<double> per_point) {
  if (per_point.size() != points_.size())
    throw PreconditionError("atlas: per-point bounds do not match the atlas");
  constants_ = c;
  for (std::size_t k = 0; k < points_.size(); ++k) points_[k].inverse_bound = per_point[k];
}

CriticalAtlas CriticalAtlas::select(CriticalKind kind) const {
  if (kind == CriticalKind::all) return *this;
  std::vector<CriticalPoint> kept;
  for (const auto& c : points_) {
    Eigen::SelfAdjointEigenSolver<Mat> es(c.hessian, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    if ((kind == CriticalKind::minima && ev.minCoeff() > 0.0) ||
        (kind == CriticalKind::maxima && ev.maxCoeff() < 0.0))
      kept.push_back(c);
  }
  CriticalAtlas out(potential_, region_, std::move(kept));
  return out;
}

CriticalAtlas CriticalAtlas::scaled(int n, const std::optional<Mat>& a) const {
  auto pn = std::make_shared<const PatternPotential>(potential_->scaled(n, a));
  const Mat inc = pn->pullback() * potential_->pullback_inverse();
  const Mat inc_inv = inc.inverse();
  std::vector<CriticalPoint> pts;
  pts.reserve(points_.size());
  for (const auto& c : points_) {
    CriticalPoint s;
    s.z = inc_inv * c.z;
    s.hessian = inc.transpose() * c.hessian * inc;
    s.det = s.hessian.determinant();
    pts.push_back(std::move(s));
  }
  return CriticalAtlas(std::move(pn), region_.transformed(inc_inv), std::move(pts));
}

// --- Search -----------------------------------------------------------------

namespace {

std::vector<Vec> grid_seeds(const Region& region, double step) {
  const int d = region.dim();
  const Vec lo = region.lower(), hi = region.upper();
  std::vector<std::int64_t> count(d), idx(d, 0);
  for (int k = 0; k < d; ++k)
    count[k] = static_cast<std::int64_t>(std::floor((hi[k] - lo[k]) / step)) + 1;
  std::vector<Vec> seeds;
  Vec x(d);
  while (true) {
    for (int k = 0; k < d; ++k) x[k] = lo[k] + step * static_cast<double>(idx[k]);
    if (region.contains(x, step)) seeds.push_back(x);
    int k = 0;
    for (; k < d; ++k) {
      if (++idx[k] < count[k]) break;
      idx[k] = 0;
    }
    if (k == d) break;
  }
  return seeds;
}

}  // namespace

CriticalAtlas find_critical_points(std::shared_ptr<const PatternPotential> p, const Region& region,
                                   double grid_step, double tol, const AtlasOptions& options) {
  if (!p) throw PreconditionError("atlas: no potential");
  if (region.dim() != p->dim()) throw ConfigError("atlas: region dimension mismatch");
  if (region.empty()) throw ConfigError("atlas: empty region");
  if (!(grid_step > 0.0) || grid_step > 0.5 * p->equivariance_range() * (1.0 + 1e-12))
    throw PreconditionError("atlas: grid step must be in (0, equivariance_range / 2]");
  if (!(tol > 0.0) || tol > 1e-10) throw PreconditionError("atlas: tol must be in (0, 1e-10]");

  const auto seeds = grid_seeds(region, grid_step);
  const double gtol = std::min(tol, 1e-11);
  const double eps = std::sqrt(tol);
  std::vector<std::optional<CriticalPoint>> found(seeds.size());
  parallel_for(seeds.size(), options.threads, [&](std::size_t k) {
    const auto nr = newton_gradient(*p, seeds[k], Vec::Zero(p->dim()), gtol);
    if (!nr.converged || !(nr.residual < gtol)) return;
    Vec x = nr.x;
    if (!region.contains_half_open(x, eps)) return;
    FieldSample s = p->eval(x);
    const double det = s.hessian.determinant();
    if (!(std::abs(det) > options.det_threshold)) return;
    // Slow approach to a flat region can push |grad V| under gtol with a
    // still-invertible Hessian; a genuine zero has a negligible Newton step.
    if (s.hessian.fullPivLu().solve(s.gradient).norm() > 1e-3 * eps) return;
    // Bump wells sit exactly on the (pulled-back) set points; prefer the
    // exact position over Newton's last iterate when it is just as critical.
    if (p->kind() == PotentialKind::bump_sum) {
      const Vec y = p->pullback() * x;
      for (auto q : p->base_set()->index().within(y, eps * std::max(1.0, op_norm(p->pullback())))) {
        const Vec z = p->pullback_inverse() * p->base_set()->point(q);
        if ((z - x).norm() < eps && region.contains_half_open(z, eps)) {
          FieldSample sz = p->eval(z);
          if (sz.gradient.norm() <= gtol) {
            x = z;
            s = std::move(sz);
          }
        }
      }
    }
    found[k] = CriticalPoint{x, s.hessian, s.hessian.determinant(), 0.0};
  });

  // Merge in seed order at radius sqrt(tol).
  using Key = std::vector<std::int64_t>;
  std::map<Key, std::vector<std::size_t>> cells;
  std::vector<CriticalPoint> kept;
  const int d = p->dim();
  auto key_of = [&](const Vec& x) {
    Key key(d);
    for (int a = 0; a < d; ++a) key[a] = static_cast<std::int64_t>(std::floor(x[a] / eps));
    return key;
  };
  for (auto& f : found) {
    if (!f) continue;
    const Key centre = key_of(f->z);
    bool duplicate = false;
    const int span = 1;
    std::vector<std::int64_t> off(d, -span);
    while (!duplicate) {
      Key key = centre;
      for (int a = 0; a < d; ++a) key[a] += off[a];
      if (auto it = cells.find(key); it != cells.end())
        for (auto j : it->second)
          if ((kept[j].z - f->z).norm() < eps) duplicate = true;
      int a = 0;
      for (; a < d; ++a) {
        if (++off[a] <= span) break;
        off[a] = -span;
      }
      if (a == d) break;
    }
    if (duplicate) continue;
    cells[centre].push_back(kept.size());
    kept.push_back(std::move(*f));
  }
  return CriticalAtlas(std::move(p), region, std::move(kept));
}

// --- Constants --------------------------------------------------------------

std::vector<Vec> probe_directions(int d, int probe_count) {
  if (probe_count < 1) throw PreconditionError("probe_count must be >= 1");
  std::vector<Vec> dirs;
  if (d == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
    return dirs;
  }
  if (d == 2) {
    const int m = std::max(probe_count, 2);
    for (int k = 0; k < m; ++k) {
      Vec v(2);
      v << std::cos(2.0 * M_PI * k / m), std::sin(2.0 * M_PI * k / m);
      dirs.push_back(v);
    }
    return dirs;
  }
  for (int k = 0; k < d; ++k) {
    dirs.push_back(Vec::Unit(d, k));
    dirs.push_back(-Vec::Unit(d, k));
  }
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  while (static_cast<int>(dirs.size()) < probe_count) {
    Vec v(d);
    for (int k = 0; k < d; ++k) v[k] = normal(rng);
    dirs.push_back(v.normalized());
  }
  return dirs;
}

namespace {

// Newton from z only sees V on the equivariance ball around each iterate, so
// atlas points whose surrounding patterns agree behave identically. Group
// them and probe one representative per class.
std::vector<std::size_t> pattern_classes(const CriticalAtlas& atlas, std::vector<std::size_t>& reps) {
  const auto& p = atlas.potential();
  std::map<std::vector<std::int64_t>, std::size_t> seen;
  std::vector<std::size_t> cls(atlas.size());
  const double q = 1e-9;
  for (std::size_t k = 0; k < atlas.size(); ++k) {
    std::vector<std::int64_t> sig;
    const Vec& z = atlas.point(k).z;
    const Vec y = p.pullback() * z;
    if (p.kind() == PotentialKind::bump_sum) {
      for (const auto& v : p.base_set()->local_pattern(y, 2.0 * p.base_range() + 1e-9))
        for (Eigen::Index a = 0; a < v.size(); ++a) sig.push_back(std::llround(v[a] / q));
      // Near the set's edge the pattern is truncated; keep those separate.
      if (p.base_set()->extent().depth(y) < 2.0 * p.base_range()) {
        for (Eigen::Index a = 0; a < y.size(); ++a) sig.push_back(std::llround(y[a] / q));
      }
    } else {
      for (Eigen::Index a = 0; a < y.size(); ++a) {
        const double m = y[a] - 2.0 * M_PI * std::floor(y[a] / (2.0 * M_PI));
        sig.push_back(std::llround(m / q) % std::llround(2.0 * M_PI / q));
      }
    }
    auto [it, inserted] = seen.emplace(std::move(sig), reps.size());
    if (inserted) reps.push_back(k);
    cls[k] = it->second;
  }
  return cls;
}

struct ProbeOutcome {
  bool ok = true;
  double inverse_bound = 0.0;
  double displacement = 0.0;
};

ProbeOutcome probe_point(const PatternPotential& p, const CriticalPoint& c,
                         const std::vector<Vec>& dirs, double radius, bool constrained) {
  ProbeOutcome out;
  const double range = p.equivariance_range();
  const double h0 = op_norm(c.hessian.inverse());
  const double sign0 = c.det > 0.0 ? 1.0 : -1.0;
  for (const auto& dir : dirs) {
    const Vec y = radius * dir;
    const auto nr = newton_gradient(p, c.z, y, 1e-12 * std::max(1.0, radius), range);
    if (!nr.converged) {
      out.ok = false;
      return out;
    }
    const Mat h = p.eval(nr.x).hessian;
    const double det = h.determinant();
    const Eigen::FullPivLU<Mat> lu(h);
    if (!lu.isInvertible()) {
      out.ok = false;
      return out;
    }
    const double hinv = op_norm(lu.inverse());
    if (constrained && (det * sign0 <= 0.0 || hinv > 10.0 * h0)) {
      out.ok = false;
      return out;
    }
    out.inverse_bound = std::max(out.inverse_bound, hinv);
    out.displacement = std::max(out.displacement, (nr.x - c.z).norm());
  }
  return out;
}

struct Sweep {
  bool ok = true;
  std::vector<ProbeOutcome> per_class;
};

Sweep probe_all(const CriticalAtlas& atlas, const std::vector<std::size_t>& reps,
                const std::vector<Vec>& dirs, double radius, bool constrained, int threads) {
  Sweep s;
  s.per_class.resize(reps.size());
  parallel_for(reps.size(), threads, [&](std::size_t k) {
    s.per_class[k] = probe_point(atlas.potential(), atlas.point(reps[k]), dirs, radius, constrained);
  });
  for (const auto& o : s.per_class) s.ok = s.ok && o.ok;
  return s;
}

}  // namespace

LandscapeConstants estimate_constants(CriticalAtlas& atlas, int probe_count, int threads) {
  const auto& p = atlas.potential();
  const auto dirs = probe_directions(p.dim(), probe_count);
  std::vector<std::size_t> reps;
  const auto cls = pattern_classes(atlas, reps);

  // Kantorovich-style starting guess s_min^2 / (2 L).
  double smin = std::numeric_limits<double>::infinity();
  double lip = 0.0;
  const double range = p.equivariance_range();
  for (auto k : reps) {
    const auto& c = atlas.point(k);
    Eigen::JacobiSVD<Mat> svd(c.hessian);
    smin = std::min(smin, svd.singularValues().minCoeff());
    for (const auto& dir : dirs) {
      for (double frac : {0.05, 0.1, 0.2}) {
        const Vec x = c.z + frac * range * dir;
        lip = std::max(lip, (p.eval(x).hessian - c.hessian).norm() / (frac * range));
      }
    }
  }
  double guess = lip > 0.0 ? smin * smin / (2.0 * lip) : smin * range;

  auto ok = [&](double r) { return probe_all(atlas, reps, dirs, r, true, threads).ok; };
  double lo = 0.0, hi = 0.0;
  if (ok(guess)) {
    lo = guess;
    while (lo < 1e6 && ok(2.0 * lo)) lo *= 2.0;
    hi = 2.0 * lo;
  } else {
    hi = guess;
    while (true) {
      hi *= 0.5;
      if (hi < 1e-6) throw IllConditionedError("landscape: domain radius collapsed below 1e-6");
      if (ok(hi)) break;
    }
    lo = hi;
    hi = 2.0 * lo;
  }
  for (int step = 0; step < 12; ++step) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }

  const auto final = probe_all(atlas, reps, dirs, lo, true, threads);
  LandscapeConstants c;
  c.domain_radius = lo;
  std::vector<double> per_point(atlas.size());
  double kmax = 0.0;
  for (std::size_t k = 0; k < atlas.size(); ++k) {
    const auto& o = final.per_class[cls[k]];
    per_point[k] = o.inverse_bound;
    kmax = std::max(kmax, o.inverse_bound);
    c.epsilon_prime = std::max(c.epsilon_prime, o.displacement);
  }
  c.inverse_bound = 1.05 * kmax;
  atlas.set_constants(c, std::move(per_point));
  return c;
}

double inverse_bound_at(const CriticalAtlas& atlas, double radius, int probe_count) {
  const auto dirs = probe_directions(atlas.potential().dim(), probe_count);
  std::vector<std::size_t> reps;
  pattern_classes(atlas, reps);
  const auto s = probe_all(atlas, reps, dirs, radius, false, 1);
  if (!s.ok) throw NumericalError("landscape: Newton failed at the requested radius");
  double worst = 0.0;
  for (const auto& o : s.per_class) worst = std::max(worst, o.inverse_bound);
  return worst;
}

Vec local_inverse(const PatternPotential& p, const Vec& z, const Vec& y, double domain_radius,
                  double tol) {
  if (y.norm() > domain_radius * (1.0 + 1e-12))
    throw DomainError("local inverse: |y| exceeds the domain radius");
  const auto nr = newton_gradient(p, z, y, tol, p.equivariance_range());
  if (!nr.converged) throw NumericalError("local inverse: Newton did not converge");
  return nr.x;
}

void write_atlas_csv(std::ostream& out, const CriticalAtlas& atlas) {
  const int d = atlas.potential().dim();
  for (int a = 0; a < d; ++a) out << "z" << a << ',';
  out << "det";
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) out << ",h" << a << b;
  out << '\n';
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (const auto& c : atlas.points()) {
    for (int a = 0; a < d; ++a) {
      put(c.z[a]);
      out << ',';
    }
    put(c.det);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        out << ',';
        put(c.hessian(a, b));
      }
    out << '\n';
  }
}

}  // namespace fkq
