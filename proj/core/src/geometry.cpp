#include "fkq/geometry.hpp"

#include "fkq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fkq {

Region Region::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.size() < 1 || lo.size() > kMaxDim)
    throw ConfigError("region: bounds must share a dimension in [1, 4]");
  if (!lo.allFinite() || !hi.allFinite()) throw ConfigError("region: non-finite bounds");
  Region r;
  r.shape_ = Shape::box;
  r.lo_ = std::move(lo);
  r.hi_ = std::move(hi);
  r.center_ = 0.5 * (r.lo_ + r.hi_);
  r.radius_ = 0.5 * (r.hi_ - r.lo_).norm();
  return r;
}

Region Region::ball(Vec center, double radius) {
  if (center.size() < 1 || center.size() > kMaxDim)
    throw ConfigError("region: dimension must be in [1, 4]");
  if (!center.allFinite() || !std::isfinite(radius))
    throw ConfigError("region: non-finite ball");
  Region r;
  r.shape_ = Shape::ball;
  r.center_ = std::move(center);
  r.radius_ = radius;
  r.lo_ = r.center_.array() - radius;
  r.hi_ = r.center_.array() + radius;
  return r;
}

bool Region::empty() const {
  if (shape_ == Shape::ball) return !(radius_ > 0.0);
  return !((hi_ - lo_).array() > 0.0).all();
}

bool Region::contains(const Vec& x, double slack) const {
  if (shape_ == Shape::ball) return (x - center_).norm() <= radius_ + slack;
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (x[k] < lo_[k] - slack || x[k] > hi_[k] + slack) return false;
  return true;
}

bool Region::contains_half_open(const Vec& x, double eps) const {
  if (shape_ == Shape::ball) return (x - center_).norm() < radius_ - eps;
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (x[k] < lo_[k] - eps || x[k] >= hi_[k] - eps) return false;
  return true;
}

double Region::depth(const Vec& x) const {
  if (shape_ == Shape::ball) return radius_ - (x - center_).norm();
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < x.size(); ++k)
    d = std::min({d, x[k] - lo_[k], hi_[k] - x[k]});
  return d;
}

Region Region::shrunk(double margin) const {
  if (shape_ == Shape::ball) return ball(center_, radius_ - margin);
  Vec lo = lo_.array() + margin;
  Vec hi = hi_.array() - margin;
  return box(lo, hi);
}

Region Region::transformed(const Mat& a) const {
  if (shape_ == Shape::ball) {
    // Conformal test: A^T A = c^2 I.
    const Mat ata = a.transpose() * a;
    const double c2 = ata(0, 0);
    const Mat iso = c2 * Mat::Identity(ata.rows(), ata.cols());
    if ((ata - iso).norm() <= 1e-12 * std::max(1.0, c2))
      return ball(a * center_, std::sqrt(c2) * radius_);
  }
  // Image of the bounding box.
  Vec c = a * center_;
  Vec half = 0.5 * (hi_ - lo_);
  Vec ext = a.cwiseAbs() * half;
  return box(c - ext, c + ext);
}

double Region::volume() const {
  if (shape_ == Shape::ball) {
    const int d = dim();
    return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(radius_, d);
  }
  return (hi_ - lo_).prod();
}

// ---------------------------------------------------------------------------

std::size_t SpatialHash::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (auto v : k) {
    h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

SpatialHash::SpatialHash(std::span<const Vec> points, double cell)
    : points_(points.begin(), points.end()), cell_(cell) {
  if (!(cell > 0.0) || !std::isfinite(cell)) throw ConfigError("spatial hash: cell must be > 0");
  dim_ = points_.empty() ? 0 : static_cast<int>(points_.front().size());
  min_key_.fill(std::numeric_limits<std::int64_t>::max());
  max_key_.fill(std::numeric_limits<std::int64_t>::min());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Key k = key_of(points_[i]);
    for (int a = 0; a < dim_; ++a) {
      min_key_[a] = std::min(min_key_[a], k[a]);
      max_key_[a] = std::max(max_key_[a], k[a]);
    }
    cells_[k].push_back(i);
  }
}

SpatialHash::Key SpatialHash::key_of(const Vec& x) const {
  Key k{};
  for (Eigen::Index a = 0; a < x.size(); ++a)
    k[a] = static_cast<std::int64_t>(std::floor(x[a] / cell_));
  return k;
}

void SpatialHash::visit_ring(const Key& centre, std::int64_t ring,
                             const std::function<void(std::size_t)>& fn) const {
  // Enumerate the cube [-ring, ring]^d and keep cells with Chebyshev
  // distance exactly `ring`.
  Key offset{};
  for (int a = 0; a < dim_; ++a) offset[a] = -ring;
  while (true) {
    std::int64_t cheb = 0;
    for (int a = 0; a < dim_; ++a) cheb = std::max(cheb, std::abs(offset[a]));
    if (cheb == ring) {
      Key k{};
      for (int a = 0; a < dim_; ++a) k[a] = centre[a] + offset[a];
      if (auto it = cells_.find(k); it != cells_.end())
        for (std::size_t idx : it->second) fn(idx);
    }
    int a = 0;
    for (; a < dim_; ++a) {
      if (offset[a] < ring) {
        ++offset[a];
        break;
      }
      offset[a] = -ring;
    }
    if (a == dim_) break;
  }
}

std::optional<std::size_t> SpatialHash::nearest(const Vec& x,
                                                std::optional<std::size_t> exclude) const {
  if (points_.empty()) return std::nullopt;
  const Key centre = key_of(x);
  std::int64_t max_ring = 0;
  for (int a = 0; a < dim_; ++a) {
    max_ring = std::max({max_ring, std::abs(centre[a] - min_key_[a]),
                         std::abs(max_key_[a] - centre[a])});
  }
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
    // Anything in this ring or beyond is at least (ring - 1) * cell away.
    if (best && static_cast<double>(ring - 1) * cell_ > best_d) break;
    visit_ring(centre, ring, [&](std::size_t idx) {
      if (exclude && idx == *exclude) return;
      const double d = (points_[idx] - x).norm();
      if (d < best_d || (d == best_d && best && lex_less(points_[idx], points_[*best]))) {
        best_d = d;
        best = idx;
      }
    });
  }
  return best;
}

std::vector<std::size_t> SpatialHash::within(const Vec& x, double radius) const {
  std::vector<std::size_t> out;
  if (points_.empty() || radius < 0.0) return out;
  const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell_));
  const Key centre = key_of(x);
  for (std::int64_t ring = 0; ring <= reach; ++ring) {
    visit_ring(centre, ring, [&](std::size_t idx) {
      if ((points_[idx] - x).norm() <= radius) out.push_back(idx);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::size_t> SpatialHash::any_within(const Vec& x, double radius) const {
  if (points_.empty()) return std::nullopt;
  const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell_));
  const Key centre = key_of(x);
  std::optional<std::size_t> hit;
  for (std::int64_t ring = 0; ring <= reach && !hit; ++ring) {
    visit_ring(centre, ring, [&](std::size_t idx) {
      if (!hit && (points_[idx] - x).norm() < radius) hit = idx;
    });
  }
  return hit;
}

// ---------------------------------------------------------------------------

Vec nelder_mead_maximize(const std::function<double(const Vec&)>& f, const Vec& x0,
                         double step, int max_iter, double ftol) {
  const auto n = x0.size();
  std::vector<Vec> simplex(n + 1, x0);
  std::vector<double> val(n + 1);
  for (Eigen::Index k = 0; k < n; ++k) simplex[k + 1][k] += step;
  for (Eigen::Index k = 0; k <= n; ++k) val[k] = f(simplex[k]);

  std::vector<std::size_t> order(n + 1);
  for (int it = 0; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return val[a] > val[b]; });
    const std::size_t best = order.front(), worst = order.back(),
                      second = order[order.size() - 2];
    if (std::abs(val[best] - val[worst]) <= ftol) break;

    Vec centroid = Vec::Zero(n);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) centroid += simplex[order[k]];
    centroid /= static_cast<double>(n);

    const Vec xr = centroid + (centroid - simplex[worst]);
    const double fr = f(xr);
    if (fr > val[best]) {
      const Vec xe = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = f(xe);
      if (fe > fr) {
        simplex[worst] = xe;
        val[worst] = fe;
      } else {
        simplex[worst] = xr;
        val[worst] = fr;
      }
      continue;
    }
    if (fr > val[second]) {
      simplex[worst] = xr;
      val[worst] = fr;
      continue;
    }
    const Vec xc = centroid + 0.5 * (simplex[worst] - centroid);
    const double fc = f(xc);
    if (fc > val[worst]) {
      simplex[worst] = xc;
      val[worst] = fc;
      continue;
    }
    for (std::size_t k = 1; k < order.size(); ++k) {
      auto& v = simplex[order[k]];
      v = simplex[best] + 0.5 * (v - simplex[best]);
      val[order[k]] = f(v);
    }
  }
  const auto it = std::max_element(val.begin(), val.end());
  return simplex[static_cast<std::size_t>(it - val.begin())];
}

}  // namespace fkq
