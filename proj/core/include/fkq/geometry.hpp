#pragma once

#include "fkq/types.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <thread>
#include <unordered_map>
#include <vector>

namespace fkq {

/// Axis-aligned box or Euclidean ball in R^d. Boxes are closed.
class Region {
 public:
  enum class Shape { box, ball };

  static Region box(Vec lo, Vec hi);
  static Region ball(Vec center, double radius);

  Shape shape() const { return shape_; }
  int dim() const { return static_cast<int>(lo_.size()); }
  bool empty() const;

  /// Closed membership, widened by `slack` (may be negative).
  bool contains(const Vec& x, double slack = 0.0) const;

  /// Half-open membership lo - eps <= x < hi - eps per coordinate (boxes);
  /// balls use |x - c| < r - eps. This is the convention for search regions.
  bool contains_half_open(const Vec& x, double eps) const;

  /// Distance from x to the complement; negative when x is outside.
  double depth(const Vec& x) const;

  Region shrunk(double margin) const;
  Region expanded(double margin) const { return shrunk(-margin); }

  /// Region containing {A x : x in this}. Balls stay balls under conformal
  /// maps (A = c Q with Q orthogonal); otherwise the bounding box is used.
  Region transformed(const Mat& a) const;

  const Vec& lower() const { return lo_; }
  const Vec& upper() const { return hi_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  double volume() const;

 private:
  Shape shape_ = Shape::box;
  Vec lo_, hi_, center_;
  double radius_ = 0.0;
};

/// Uniform-grid hash over a fixed point list. Queries are exact; the grid
/// only prunes candidates.
class SpatialHash {
 public:
  SpatialHash() = default;
  SpatialHash(std::span<const Vec> points, double cell);

  std::size_t size() const { return points_.size(); }
  double cell() const { return cell_; }
  const Vec& point(std::size_t i) const { return points_[i]; }

  /// Nearest stored point; ties go to the lexicographically smaller point.
  /// `exclude` skips one stored index (nearest-other queries).
  std::optional<std::size_t> nearest(const Vec& x,
                                     std::optional<std::size_t> exclude = std::nullopt) const;

  /// All stored points with |p - x| <= radius, in storage order.
  std::vector<std::size_t> within(const Vec& x, double radius) const;

  /// Some stored point with |p - x| < radius (strict), if any.
  std::optional<std::size_t> any_within(const Vec& x, double radius) const;

 private:
  using Key = std::array<std::int64_t, kMaxDim>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  Key key_of(const Vec& x) const;
  void visit_ring(const Key& centre, std::int64_t ring,
                  const std::function<void(std::size_t)>& fn) const;

  std::vector<Vec> points_;
  double cell_ = 1.0;
  int dim_ = 0;
  Key min_key_{}, max_key_{};
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> cells_;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work is split into
/// contiguous chunks so results written by index are deterministic.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(threads < 1 ? 1 : threads));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Nelder-Mead maximisation of f starting from x0 with initial simplex
/// edge `step`. Returns the best vertex.
Vec nelder_mead_maximize(const std::function<double(const Vec&)>& f, const Vec& x0,
                         double step, int max_iter = 400, double ftol = 1e-13);

}  // namespace fkq
