#include "fkq/pointset.hpp"

#include "fkq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

namespace fkq {

std::string_view to_string(SetFamily f) {
  switch (f) {
    case SetFamily::periodic: return "periodic";
    case SetFamily::fibonacci: return "fibonacci";
    case SetFamily::ammann_beenker: return "ammann-beenker";
    case SetFamily::cut_and_project: return "cut-and-project";
    case SetFamily::imported: return "imported";
  }
  return "unknown";
}

// --- Window -----------------------------------------------------------------

Window Window::interval(double lo, double hi, bool lo_closed, bool hi_closed) {
  Window w;
  w.dim_ = 1;
  w.lo_ = lo;
  w.hi_ = hi;
  w.lo_closed_ = lo_closed;
  w.hi_closed_ = hi_closed;
  return w;
}

Window Window::polygon(std::vector<Eigen::Vector2d> vertices) {
  if (vertices.size() < 3) throw ConfigError("window polygon needs at least 3 vertices");
  Window w;
  w.dim_ = 2;
  w.vertices_ = std::move(vertices);
  return w;
}

Window Window::projected_cube(const Mat& internal, const Vec& offset) {
  const auto n = internal.cols();
  if (internal.rows() == 1) {
    double half = 0.5 * internal.row(0).cwiseAbs().sum();
    return interval(offset[0] - half, offset[0] + half, true, true);
  }
  if (internal.rows() != 2) throw NotImplementedError("window: internal dimension must be 1 or 2");
  std::vector<Eigen::Vector2d> corners;
  for (std::int64_t mask = 0; mask < (std::int64_t{1} << n); ++mask) {
    Vec c(n);
    for (Eigen::Index j = 0; j < n; ++j) c[j] = (mask >> j) & 1 ? 0.5 : -0.5;
    Vec y = internal * c + offset;
    corners.emplace_back(y[0], y[1]);
  }
  // Andrew's monotone chain.
  std::sort(corners.begin(), corners.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  std::vector<Eigen::Vector2d> hull(2 * corners.size());
  std::size_t k = 0;
  for (const auto& p : corners) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 1e-12) --k;
    hull[k++] = p;
  }
  for (std::size_t i = corners.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], corners[i]) <= 1e-12) --k;
    hull[k++] = corners[i];
  }
  hull.resize(k - 1);
  return polygon(std::move(hull));
}

bool Window::contains(const Vec& y) const {
  if (dim_ == 1) {
    const double v = y[0];
    const bool above = lo_closed_ ? v >= lo_ : v > lo_;
    const bool below = hi_closed_ ? v <= hi_ : v < hi_;
    return above && below;
  }
  const Eigen::Vector2d p(y[0], y[1]);
  for (std::size_t k = 0; k < vertices_.size(); ++k) {
    const auto& a = vertices_[k];
    const auto& b = vertices_[(k + 1) % vertices_.size()];
    const double c = (b - a).x() * (p - a).y() - (b - a).y() * (p - a).x();
    if (c < 0.0) return false;
  }
  return true;
}

bool Window::has_interior() const {
  if (dim_ == 1) return hi_ > lo_;
  double area = 0.0;
  for (std::size_t k = 0; k < vertices_.size(); ++k) {
    const auto& a = vertices_[k];
    const auto& b = vertices_[(k + 1) % vertices_.size()];
    area += a.x() * b.y() - a.y() * b.x();
  }
  return area > 0.0;
}

Vec Window::lower() const {
  if (dim_ == 1) return Vec::Constant(1, lo_);
  Vec lo = Vec::Constant(2, std::numeric_limits<double>::infinity());
  for (const auto& v : vertices_) {
    lo[0] = std::min(lo[0], v.x());
    lo[1] = std::min(lo[1], v.y());
  }
  return lo;
}

Vec Window::upper() const {
  if (dim_ == 1) return Vec::Constant(1, hi_);
  Vec hi = Vec::Constant(2, -std::numeric_limits<double>::infinity());
  for (const auto& v : vertices_) {
    hi[0] = std::max(hi[0], v.x());
    hi[1] = std::max(hi[1], v.y());
  }
  return hi;
}

// --- Schemes ----------------------------------------------------------------

void CutAndProjectScheme::validate() const {
  const int n = total_dim, d = physical_dim;
  if (n < 2 || n > kMaxDim || d < 1 || d >= n)
    throw ConfigError("cut-and-project: need 1 <= d < n <= 4");
  if (lattice_basis.rows() != n || lattice_basis.cols() != n)
    throw ConfigError("cut-and-project: lattice basis must be n x n");
  if ((lattice_basis.array() - lattice_basis.array().round()).abs().maxCoeff() > 0.0)
    throw ConfigError("cut-and-project: lattice basis must be integral");
  if (std::abs(std::abs(lattice_basis.determinant()) - 1.0) > 1e-9)
    throw ConfigError("cut-and-project: lattice basis must be unimodular");
  if (physical_projection.rows() != d || physical_projection.cols() != n)
    throw ConfigError("cut-and-project: physical projection must be d x n");
  if (internal_projection.rows() != n - d || internal_projection.cols() != n)
    throw ConfigError("cut-and-project: internal projection must be (n - d) x n");
  if (window.dim() != n - d) throw ConfigError("cut-and-project: window dimension mismatch");
  if (!window.has_interior()) throw ConfigError("cut-and-project: window has empty interior");
  Mat full(n, n);
  full << physical_projection, internal_projection;
  if (std::abs(full.determinant()) < 1e-12)
    throw ConfigError("cut-and-project: projections are not complementary");
}

CutAndProjectScheme fibonacci_scheme() {
  const double phi = kGoldenRatio;
  CutAndProjectScheme s;
  s.total_dim = 2;
  s.physical_dim = 1;
  s.lattice_basis = Mat::Identity(2, 2);
  s.physical_projection = Mat(1, 2);
  s.physical_projection << phi, 1.0;
  s.internal_projection = Mat(1, 2);
  s.internal_projection << 1.0, -phi;
  // Projection of (0, 1] x [0, 1): q = n1 - phi n2 in (-phi, 1].
  s.window = Window::interval(-phi, 1.0, false, true);
  return s;
}

CutAndProjectScheme ammann_beenker_scheme() {
  CutAndProjectScheme s;
  s.total_dim = 4;
  s.physical_dim = 2;
  s.lattice_basis = Mat::Identity(4, 4);
  s.physical_projection = Mat(2, 4);
  s.internal_projection = Mat(2, 4);
  for (int j = 0; j < 4; ++j) {
    s.physical_projection(0, j) = std::cos(j * M_PI / 4.0);
    s.physical_projection(1, j) = std::sin(j * M_PI / 4.0);
    s.internal_projection(0, j) = std::cos(3.0 * j * M_PI / 4.0);
    s.internal_projection(1, j) = std::sin(3.0 * j * M_PI / 4.0);
  }
  Vec offset(2);
  offset << 0.0123456789, 0.0234567891;
  s.window = Window::projected_cube(s.internal_projection, offset);
  return s;
}

// --- Radii ------------------------------------------------------------------

namespace {

double default_cell(std::span<const Vec> points) {
  if (points.size() < 2) return 1.0;
  Vec lo = points.front(), hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const int d = static_cast<int>(lo.size());
  double vol = 1.0;
  int live = 0;
  for (int k = 0; k < d; ++k) {
    if (hi[k] > lo[k]) {
      vol *= hi[k] - lo[k];
      ++live;
    }
  }
  if (live == 0) return 1.0;
  const double spacing = std::pow(vol / static_cast<double>(points.size()), 1.0 / live);
  return std::max(spacing, 1e-9);
}

double covering_1d(std::span<const Vec> points, const Region& extent, double margin) {
  std::vector<double> xs;
  xs.reserve(points.size());
  for (const auto& p : points) xs.push_back(p[0]);
  std::sort(xs.begin(), xs.end());
  double a = extent.lower()[0] + margin, b = extent.upper()[0] - margin;
  if (a > b) {
    a = extent.lower()[0];
    b = extent.upper()[0];
  }
  double best = 0.0;
  auto consider = [&](double c) {
    auto it = std::lower_bound(xs.begin(), xs.end(), c);
    double d = std::numeric_limits<double>::infinity();
    if (it != xs.end()) d = std::min(d, *it - c);
    if (it != xs.begin()) d = std::min(d, c - *std::prev(it));
    best = std::max(best, d);
  };
  consider(a);
  consider(b);
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    if (xs[k + 1] < a || xs[k] > b) continue;
    consider(std::clamp(0.5 * (xs[k] + xs[k + 1]), a, b));
  }
  return best;
}

double covering_sampled(std::span<const Vec> points, const SpatialHash& hash,
                        const Region& extent, double margin, double packing) {
  Region region = extent.shrunk(margin);
  if (region.empty()) region = extent;
  const int d = region.dim();
  const double step = packing / 4.0;
  auto distance = [&](const Vec& c) {
    if (!region.contains(c)) return -std::numeric_limits<double>::infinity();
    return (points[*hash.nearest(c)] - c).norm();
  };

  std::vector<std::int64_t> counts(d);
  for (int k = 0; k < d; ++k)
    counts[k] = static_cast<std::int64_t>(
                    std::floor((region.upper()[k] - region.lower()[k]) / step)) + 1;

  // Keep the best few samples as refinement seeds.
  constexpr std::size_t kSeeds = 32;
  std::vector<std::pair<double, Vec>> seeds;
  std::vector<std::int64_t> idx(d, 0);
  Vec c(d);
  while (true) {
    for (int k = 0; k < d; ++k) c[k] = region.lower()[k] + step * static_cast<double>(idx[k]);
    if (region.contains(c)) {
      const double v = (points[*hash.nearest(c)] - c).norm();
      if (seeds.size() < kSeeds || v > seeds.back().first) {
        seeds.emplace_back(v, c);
        std::sort(seeds.begin(), seeds.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        if (seeds.size() > kSeeds) seeds.pop_back();
      }
    }
    int k = 0;
    for (; k < d; ++k) {
      if (++idx[k] < counts[k]) break;
      idx[k] = 0;
    }
    if (k == d) break;
  }
  double best = 0.0;
  for (const auto& [v, seed] : seeds) {
    best = std::max(best, v);
    const Vec refined = nelder_mead_maximize(distance, seed, step / 2.0);
    best = std::max(best, distance(refined));
  }
  return best;
}

Radii radii_with_index(std::span<const Vec> points, const SpatialHash& hash,
                       const Region& extent) {
  const int d = extent.dim();
  if (points.size() < static_cast<std::size_t>(d) + 2)
    throw PreconditionError("radii: covering radius undefined for fewer than d + 2 points");
  double min_gap = std::numeric_limits<double>::infinity();
  double max_nn = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto j = hash.nearest(points[i], i);
    const double gap = (points[*j] - points[i]).norm();
    min_gap = std::min(min_gap, gap);
    max_nn = std::max(max_nn, gap);
  }
  if (!(min_gap > 0.0)) throw ConfigError("radii: duplicate points");
  Radii r;
  r.packing = 0.5 * min_gap;
  r.covering = d == 1 ? covering_1d(points, extent, max_nn)
                      : covering_sampled(points, hash, extent, max_nn, r.packing);
  return r;
}

}  // namespace

Radii compute_radii(std::span<const Vec> points, const Region& extent) {
  const SpatialHash hash(points, default_cell(points));
  return radii_with_index(points, hash, extent);
}

// --- DeloneSet --------------------------------------------------------------

DeloneSet::DeloneSet(std::vector<Vec> points, Region extent, SetFamily family,
                     std::optional<Mat> self_affinity, std::vector<IVec> lattice_coords,
                     double spacing)
    : extent_(std::move(extent)),
      family_(family),
      self_affinity_(std::move(self_affinity)),
      spacing_(spacing) {
  if (points.empty()) throw EmptySetError("delone set: no points");
  dim_ = extent_.dim();
  if (!lattice_coords.empty() && lattice_coords.size() != points.size())
    throw ConfigError("delone set: lattice coordinates must align with points");
  for (const auto& p : points) {
    if (p.size() != dim_) throw ConfigError("delone set: point dimension mismatch");
    if (!p.allFinite()) throw ConfigError("delone set: non-finite point");
  }

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return lex_less(points[a], points[b]); });
  points_.reserve(points.size());
  for (auto i : order) points_.push_back(points[i]);
  if (!lattice_coords.empty()) {
    lattice_coords_.reserve(order.size());
    for (auto i : order) lattice_coords_.push_back(lattice_coords[i]);
  }

  if (self_affinity_) {
    if (self_affinity_->rows() != dim_ || self_affinity_->cols() != dim_)
      throw ConfigError("delone set: self-affinity must be d x d");
    for (double m : eigenvalue_magnitudes())
      if (!(m > 1.0)) throw ConfigError("delone set: self-affinity matrix is not expanding");
  }

  index_ = std::make_shared<const SpatialHash>(points_, default_cell(points_));
  radii_ = radii_with_index(points_, *index_, extent_);
}

std::vector<double> DeloneSet::eigenvalue_magnitudes() const {
  if (!self_affinity_) return {};
  Eigen::MatrixXd a = *self_affinity_;
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  std::vector<double> mags;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    mags.push_back(std::abs(es.eigenvalues()[k]));
  std::sort(mags.rbegin(), mags.rend());
  return mags;
}

std::vector<Vec> DeloneSet::local_pattern(const Vec& centre, double radius) const {
  std::vector<Vec> rel;
  for (auto i : index_->within(centre, radius)) rel.push_back(points_[i] - centre);
  std::sort(rel.begin(), rel.end(), [](const Vec& a, const Vec& b) { return lex_less(a, b); });
  return rel;
}

// --- Builders ---------------------------------------------------------------

DeloneSet build_periodic(int d, double spacing, const Region& extent) {
  if (d < 1 || d > kMaxDim) throw ConfigError("periodic: dimension must be in [1, 4]");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ConfigError("periodic: spacing must be > 0");
  if (extent.dim() != d) throw ConfigError("periodic: extent dimension mismatch");
  if (extent.empty()) throw ConfigError("periodic: empty extent");
  const double slack = 1e-9 * spacing;
  std::vector<std::int64_t> lo(d), hi(d);
  for (int k = 0; k < d; ++k) {
    lo[k] = static_cast<std::int64_t>(std::ceil((extent.lower()[k] - slack) / spacing));
    hi[k] = static_cast<std::int64_t>(std::floor((extent.upper()[k] + slack) / spacing));
    if (hi[k] < lo[k]) throw EmptySetError("periodic: extent contains no lattice point");
  }
  std::vector<Vec> pts;
  std::vector<IVec> coords;
  std::vector<std::int64_t> idx(lo);
  while (true) {
    IVec k(d);
    for (int a = 0; a < d; ++a) k[a] = idx[a];
    Vec x = spacing * to_vec(k);
    if (extent.contains(x, slack)) {
      pts.push_back(x);
      coords.push_back(k);
    }
    int a = 0;
    for (; a < d; ++a) {
      if (++idx[a] <= hi[a]) break;
      idx[a] = lo[a];
    }
    if (a == d) break;
  }
  if (pts.empty()) throw EmptySetError("periodic: extent contains no lattice point");
  return DeloneSet(std::move(pts), extent, SetFamily::periodic, std::nullopt, std::move(coords),
                   spacing);
}

namespace {

struct Enumeration {
  std::vector<Vec> points;
  std::vector<IVec> coords;
};

Enumeration enumerate_cut_and_project(const CutAndProjectScheme& s, const Region& extent) {
  s.validate();
  const int n = s.total_dim, d = s.physical_dim, m = n - d;
  if (extent.dim() != d) throw ConfigError("cut-and-project: extent dimension mismatch");
  if (extent.empty()) throw ConfigError("cut-and-project: empty extent");

  const Mat phys = s.physical_projection * s.lattice_basis;
  const Mat intl = s.internal_projection * s.lattice_basis;
  Mat full(n, n);
  full << phys, intl;
  const Mat inv = full.inverse();

  // Bounding box of the coefficient vectors whose images can be accepted.
  Vec centre(n), half(n);
  centre << 0.5 * (extent.lower() + extent.upper()),
      0.5 * (s.window.lower() + s.window.upper());
  half << 0.5 * (extent.upper() - extent.lower()), 0.5 * (s.window.upper() - s.window.lower());
  const Vec kc = inv * centre;
  const Vec kh = inv.cwiseAbs() * half;
  std::vector<std::int64_t> klo(n), khi(n);
  for (int j = 0; j < n; ++j) {
    klo[j] = static_cast<std::int64_t>(std::ceil(kc[j] - kh[j] - 1e-9));
    khi[j] = static_cast<std::int64_t>(std::floor(kc[j] + kh[j] + 1e-9));
  }

  // Free coordinates a (d of them) are enumerated; the remaining m are solved
  // for through the best-conditioned m x m block of the internal projection.
  std::vector<int> best_b;
  double best_det = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) != m) continue;
    std::vector<int> cols;
    for (int j = 0; j < n; ++j)
      if (mask & (1 << j)) cols.push_back(j);
    Mat blk(m, m);
    for (int c = 0; c < m; ++c) blk.col(c) = intl.col(cols[c]);
    const double det = std::abs(blk.determinant());
    if (det > best_det) {
      best_det = det;
      best_b = cols;
    }
  }
  std::vector<int> cols_a;
  for (int j = 0; j < n; ++j)
    if (std::find(best_b.begin(), best_b.end(), j) == best_b.end()) cols_a.push_back(j);
  Mat qb(m, m), qa(m, d);
  for (int c = 0; c < m; ++c) qb.col(c) = intl.col(best_b[c]);
  for (int c = 0; c < d; ++c) qa.col(c) = intl.col(cols_a[c]);
  const Mat qb_inv = qb.inverse();
  const Vec wc = 0.5 * (s.window.lower() + s.window.upper());
  const Vec wh = 0.5 * (s.window.upper() - s.window.lower());

  Enumeration out;
  std::vector<std::int64_t> ia(d);
  for (int c = 0; c < d; ++c) ia[c] = klo[cols_a[c]];
  if (std::any_of(cols_a.begin(), cols_a.end(), [&](int j) { return khi[j] < klo[j]; }))
    return out;
  std::vector<std::int64_t> blo(m), bhi(m), ib(m);
  while (true) {
    Vec ka(d);
    for (int c = 0; c < d; ++c) ka[c] = static_cast<double>(ia[c]);
    const Vec ya = qa * ka;
    const Vec bc = qb_inv * (wc - ya);
    const Vec bh = qb_inv.cwiseAbs() * wh;
    bool any = true;
    for (int c = 0; c < m; ++c) {
      blo[c] = std::max(klo[best_b[c]], static_cast<std::int64_t>(std::ceil(bc[c] - bh[c] - 1e-9)));
      bhi[c] = std::min(khi[best_b[c]], static_cast<std::int64_t>(std::floor(bc[c] + bh[c] + 1e-9)));
      if (bhi[c] < blo[c]) any = false;
      ib[c] = blo[c];
    }
    while (any) {
      IVec k(n);
      for (int c = 0; c < d; ++c) k[cols_a[c]] = ia[c];
      for (int c = 0; c < m; ++c) k[best_b[c]] = ib[c];
      const Vec kv = to_vec(k);
      if (s.window.contains(intl * kv)) {
        Vec x = phys * kv;
        if (extent.contains(x)) {
          out.points.push_back(std::move(x));
          out.coords.push_back(k);
        }
      }
      int c = 0;
      for (; c < m; ++c) {
        if (++ib[c] <= bhi[c]) break;
        ib[c] = blo[c];
      }
      if (c == m) break;
    }
    int c = 0;
    for (; c < d; ++c) {
      if (++ia[c] <= khi[cols_a[c]]) break;
      ia[c] = klo[cols_a[c]];
    }
    if (c == d) break;
  }
  return out;
}

}  // namespace

DeloneSet build_cut_and_project(const CutAndProjectScheme& scheme, const Region& extent) {
  auto e = enumerate_cut_and_project(scheme, extent);
  if (e.points.empty()) throw EmptySetError("cut-and-project: no accepted point in extent");
  return DeloneSet(std::move(e.points), extent, SetFamily::cut_and_project, std::nullopt,
                   std::move(e.coords));
}

DeloneSet build_fibonacci(const Region& extent) {
  auto e = enumerate_cut_and_project(fibonacci_scheme(), extent);
  if (e.points.empty()) throw EmptySetError("fibonacci: no accepted point in extent");
  return DeloneSet(std::move(e.points), extent, SetFamily::fibonacci,
                   Mat::Constant(1, 1, kGoldenRatio), std::move(e.coords));
}

DeloneSet build_ammann_beenker(const Region& extent) {
  auto e = enumerate_cut_and_project(ammann_beenker_scheme(), extent);
  if (e.points.empty()) throw EmptySetError("ammann-beenker: no accepted point in extent");
  const Mat a = (1.0 + std::sqrt(2.0)) * Mat::Identity(2, 2);
  return DeloneSet(std::move(e.points), extent, SetFamily::ammann_beenker, a,
                   std::move(e.coords));
}

DeloneSet build_cut_and_project(std::string_view preset, const Region& extent) {
  if (preset == "fibonacci") return build_fibonacci(extent);
  if (preset == "ammann-beenker") return build_ammann_beenker(extent);
  throw ConfigError("cut-and-project: unknown preset '" + std::string(preset) + "'");
}

// --- Addresses --------------------------------------------------------------

std::optional<std::size_t> AddressTable::find(const IVec& address) const {
  if (auto it = lookup_.find(address); it != lookup_.end()) return it->second;
  return std::nullopt;
}

AddressTable address_map(const DeloneSet& set) {
  AddressTable t;
  const int d = set.dim();
  switch (set.family()) {
    case SetFamily::fibonacci: {
      // x = phi * n1 + n2  ->  address (m, n) = (n2, n1), psi = (1, phi).
      t.rank = 2;
      t.projection = Mat(1, 2);
      t.projection << 1.0, kGoldenRatio;
      for (const auto& k : set.lattice_coords()) {
        IVec a(2);
        a << k[1], k[0];
        t.addresses.push_back(a);
      }
      break;
    }
    case SetFamily::periodic: {
      t.rank = d;
      t.projection = set.spacing() * Mat::Identity(d, d);
      for (const auto& x : set.points()) {
        IVec a(d);
        for (int k = 0; k < d; ++k) a[k] = std::llround(x[k] / set.spacing());
        t.addresses.push_back(a);
      }
      break;
    }
    default:
      throw NotImplementedError("address map: unsupported set family '" +
                                std::string(to_string(set.family())) + "'");
  }

  for (std::size_t i = 0; i < t.addresses.size(); ++i) {
    t.lookup_.emplace(t.addresses[i], i);
    if ((t.reconstruct(t.addresses[i]) - set.point(i)).norm() > 1e-9)
      throw NumericalError("address map: reconstruction failed");
  }

  const double reach = 3.0 * set.covering_radius();
  double lip = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (auto j : set.index().within(set.point(i), reach)) {
      if (j == i) continue;
      const double dx = (set.point(j) - set.point(i)).norm();
      const double da = to_vec(t.addresses[j] - t.addresses[i]).norm();
      lip = std::max(lip, da / dx);
    }
  }
  t.lipschitz_estimate = lip;
  return t;
}

// --- Census -----------------------------------------------------------------

std::vector<IVec> pair_cluster_census(const DeloneSet& set, double max_distance,
                                      double quantum) {
  std::set<IVec, bool (*)(const IVec&, const IVec&)> classes(
      [](const IVec& a, const IVec& b) { return lex_less(a, b); });
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (auto j : set.index().within(set.point(i), max_distance)) {
      if (j <= i) continue;
      const Vec v = set.point(j) - set.point(i);
      IVec key(v.size());
      for (Eigen::Index k = 0; k < v.size(); ++k) key[k] = std::llround(v[k] / quantum);
      // Sign is fixed on the rounded key so round-off cannot split a class.
      if (lex_less(key, IVec(-key))) key = -key;
      classes.insert(key);
    }
  }
  return {classes.begin(), classes.end()};
}

// --- CSV --------------------------------------------------------------------

void write_points_csv(std::ostream& out, std::span<const Vec> points) {
  if (points.empty()) return;
  const auto d = points.front().size();
  for (Eigen::Index k = 0; k < d; ++k) out << (k ? ",x" : "x") << k;
  out << '\n';
  char buf[40];
  for (const auto& p : points) {
    for (Eigen::Index k = 0; k < d; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", p[k]);
      out << (k ? "," : "") << buf;
    }
    out << '\n';
  }
}

std::vector<Vec> read_points_csv(std::istream& in) {
  std::vector<Vec> pts;
  std::string line;
  std::size_t lineno = 0;
  int d = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line[0] == 'x') {
      d = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
      continue;
    }
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw ConfigError("points csv: line " + std::to_string(lineno) + ": bad number");
      vals.push_back(v);
    }
    if (d < 0) d = static_cast<int>(vals.size());
    if (static_cast<int>(vals.size()) != d || d < 1 || d > kMaxDim)
      throw ConfigError("points csv: line " + std::to_string(lineno) + ": wrong column count");
    Vec p(d);
    for (int k = 0; k < d; ++k) p[k] = vals[k];
    pts.push_back(p);
  }
  return pts;
}

DeloneSet import_points_csv(std::istream& in, std::optional<Region> extent) {
  auto pts = read_points_csv(in);
  if (pts.empty()) throw EmptySetError("points csv: no points");
  if (!extent) {
    Vec lo = pts.front(), hi = pts.front();
    for (const auto& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    extent = Region::box(lo, hi);
  }
  return DeloneSet(std::move(pts), *extent, SetFamily::imported);
}

}  // namespace fkq
