#pragma once

#include "fkq/geometry.hpp"
#include "fkq/potential.hpp"
#include "fkq/types.hpp"

#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

namespace fkq {

struct NewtonResult {
  Vec x;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton for grad V(x) = y from x0. A step is halved (at most 50
/// times) until the residual decreases. Fails when the iterate leaves the
/// ball of radius `max_radius` around x0, or stalls above round-off level.
NewtonResult newton_gradient(const PatternPotential& p, const Vec& x0, const Vec& y, double tol,
                             double max_radius = std::numeric_limits<double>::infinity(),
                             int max_iter = 100);

struct CriticalPoint {
  Vec z;
  Mat hessian;
  double det = 0.0;
  /// max |H(x)^{-1}| over the probed preimages K_z(y), |y| = R_V.
  double inverse_bound = 0.0;
};

struct AtlasOptions {
  double det_threshold = 1e-8;
  int threads = 1;
};

struct LandscapeConstants {
  double domain_radius = 0.0;   // R_V
  double inverse_bound = 0.0;   // K_V, safety factor included
  double epsilon_prime = 0.0;   // sampled max |z - K_z(y)|, |y| <= R_V
};

enum class CriticalKind { all, minima, maxima };

/// Non-degenerate critical points of a potential inside a search region.
class CriticalAtlas {
 public:
  CriticalAtlas(std::shared_ptr<const PatternPotential> potential, Region region,
                std::vector<CriticalPoint> points);

  const PatternPotential& potential() const { return *potential_; }
  const std::shared_ptr<const PatternPotential>& potential_ptr() const { return potential_; }
  const Region& region() const { return region_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<CriticalPoint>& points() const { return points_; }
  const CriticalPoint& point(std::size_t k) const { return points_[k]; }
  std::vector<Vec> positions() const;
  double covering_radius() const { return covering_; }

  /// Index of the point nearest to x (ties: lexicographically smaller).
  std::size_t nearest(const Vec& x) const;
  /// Index of a stored point within `tol` of x.
  std::optional<std::size_t> find(const Vec& x, double tol = 1e-9) const;

  bool has_constants() const { return constants_.has_value(); }
  const LandscapeConstants& constants() const;
  void set_constants(const LandscapeConstants& c, std::vector<double> per_point_bounds);

  /// Restriction to local minima (positive definite Hessian) or maxima.
  CriticalAtlas select(CriticalKind kind) const;

  /// The atlas of the pull-back by A^n: points A^{-n} z, Hessians
  /// (A^n)^T H A^n, region mapped by A^{-n}. Constants are not carried over.
  /// `a` is needed only when the potential has no self-affinity of its own.
  CriticalAtlas scaled(int n, const std::optional<Mat>& a = std::nullopt) const;

 private:
  std::shared_ptr<const PatternPotential> potential_;
  Region region_;
  std::vector<CriticalPoint> points_;
  double covering_ = 0.0;
  std::shared_ptr<const SpatialHash> index_;
  std::optional<LandscapeConstants> constants_;
};

/// Newton on grad V from every node of a grid of spacing `grid_step`
/// covering `region`. Converged points inside the half-open region are merged
/// at radius sqrt(tol); points with |det H| <= det_threshold are dropped.
CriticalAtlas find_critical_points(std::shared_ptr<const PatternPotential> p, const Region& region,
                                   double grid_step, double tol = 1e-12,
                                   const AtlasOptions& options = {});

/// Largest R (bisection, 12 steps) for which Newton from every atlas point
/// solves grad V(x) = y for all probes |y| = R, staying inside the
/// equivariance ball and on the branch of z. Stores the result on the atlas.
LandscapeConstants estimate_constants(CriticalAtlas& atlas, int probe_count, int threads = 1);

/// max |H(K_z(y))^{-1}| over atlas points and probes with |y| = radius.
double inverse_bound_at(const CriticalAtlas& atlas, double radius, int probe_count);

/// K_z(y) by Newton from z. Throws DomainError if |y| > R_V and
/// NumericalError if Newton fails.
Vec local_inverse(const PatternPotential& p, const Vec& z, const Vec& y, double domain_radius,
                  double tol = 1e-13);

/// Unit probe directions: +-1 in d = 1, equally spaced angles in d = 2,
/// +-e_k followed by fixed pseudo-random directions otherwise.
std::vector<Vec> probe_directions(int d, int probe_count);

/// CSV with columns z..., det, h00, h01, ...
void write_atlas_csv(std::ostream& out, const CriticalAtlas& atlas);

}  // namespace fkq
