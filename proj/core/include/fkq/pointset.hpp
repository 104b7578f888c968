#pragma once

#include "fkq/geometry.hpp"
#include "fkq/types.hpp"

#include <cmath>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fkq {

enum class SetFamily { periodic, fibonacci, ammann_beenker, cut_and_project, imported };

std::string_view to_string(SetFamily f);

/// Acceptance window in internal space: an interval (codimension 1) or a
/// convex polygon (codimension 2).
class Window {
 public:
  static Window interval(double lo, double hi, bool lo_closed, bool hi_closed);
  /// Vertices in counter-clockwise order; the polygon is closed.
  static Window polygon(std::vector<Eigen::Vector2d> vertices);
  /// Convex hull of the projection of the unit cube [-1/2, 1/2]^n under
  /// `internal` (a zonotope), translated by `offset`.
  static Window projected_cube(const Mat& internal, const Vec& offset);

  int dim() const { return dim_; }
  bool contains(const Vec& y) const;
  bool has_interior() const;
  Vec lower() const;
  Vec upper() const;
  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }

 private:
  int dim_ = 1;
  double lo_ = 0.0, hi_ = 0.0;
  bool lo_closed_ = true, hi_closed_ = true;
  std::vector<Eigen::Vector2d> vertices_;
};

struct CutAndProjectScheme {
  int total_dim = 0;
  int physical_dim = 0;
  Mat lattice_basis;        // n x n, integer entries, |det| = 1
  Mat physical_projection;  // d x n
  Mat internal_projection;  // (n - d) x n
  Window window;

  void validate() const;
};

/// Z^2 with physical direction (phi, 1), internal direction (1, -phi) and the
/// projected half-open unit square as window. Gaps are exactly {1, phi}.
CutAndProjectScheme fibonacci_scheme();

/// Z^4 with the eightfold projection pair and a regular octagon window,
/// shifted off the singular position. Edge length 1.
CutAndProjectScheme ammann_beenker_scheme();

struct Radii {
  double packing = 0.0;
  double covering = 0.0;
};

/// Packing radius (half the minimal gap) and covering radius (largest empty
/// ball centred in the extent shrunk by the largest nearest-neighbour
/// distance). Exact in one dimension, sampled and locally refined otherwise.
Radii compute_radii(std::span<const Vec> points, const Region& extent);

/// Finite realisation of a Delone set. Immutable once built.
class DeloneSet {
 public:
  DeloneSet(std::vector<Vec> points, Region extent, SetFamily family,
            std::optional<Mat> self_affinity = std::nullopt,
            std::vector<IVec> lattice_coords = {}, double spacing = 0.0);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  std::span<const Vec> points() const { return points_; }
  const Vec& point(std::size_t i) const { return points_[i]; }
  double packing_radius() const { return radii_.packing; }
  double covering_radius() const { return radii_.covering; }
  Radii radii() const { return radii_; }
  const Region& extent() const { return extent_; }
  SetFamily family() const { return family_; }
  double spacing() const { return spacing_; }

  const std::optional<Mat>& self_affinity() const { return self_affinity_; }
  /// |lambda_1| >= ... >= |lambda_d| of the self-affinity matrix.
  std::vector<double> eigenvalue_magnitudes() const;

  /// Integer coordinates of each point in the generating lattice, when known.
  std::span<const IVec> lattice_coords() const { return lattice_coords_; }

  const SpatialHash& index() const { return *index_; }

  /// Points of the set within `radius` of `centre`, relative to `centre`,
  /// sorted lexicographically.
  std::vector<Vec> local_pattern(const Vec& centre, double radius) const;

 private:
  std::vector<Vec> points_;
  Region extent_;
  SetFamily family_;
  std::optional<Mat> self_affinity_;
  std::vector<IVec> lattice_coords_;
  double spacing_ = 0.0;
  int dim_ = 0;
  Radii radii_;
  std::shared_ptr<const SpatialHash> index_;
};

/// spacing * Z^d clipped to `extent` (closed, with a 1e-9 relative slack).
DeloneSet build_periodic(int d, double spacing, const Region& extent);

DeloneSet build_cut_and_project(const CutAndProjectScheme& scheme, const Region& extent);

/// Preset name: "fibonacci" or "ammann-beenker". Attaches the known
/// self-affinity matrix (phi I resp. (1 + sqrt 2) I).
DeloneSet build_cut_and_project(std::string_view preset, const Region& extent);

DeloneSet build_fibonacci(const Region& extent);
DeloneSet build_ammann_beenker(const Region& extent);

struct AddressTable {
  int rank = 0;
  std::vector<IVec> addresses;  // aligned with DeloneSet::points()
  Mat projection;               // d x rank, psi(address) = point
  double lipschitz_estimate = 0.0;

  Vec reconstruct(const IVec& address) const { return projection * to_vec(address); }
  std::optional<std::size_t> find(const IVec& address) const;

 private:
  friend AddressTable address_map(const DeloneSet& set);
  struct Less {
    bool operator()(const IVec& a, const IVec& b) const { return lex_less(a, b); }
  };
  std::map<IVec, std::size_t, Less> lookup_;
};

/// Rank-based addressing. Supported for fibonacci (rank 2, x = m + n phi)
/// and periodic sets (rank d).
AddressTable address_map(const DeloneSet& set);

/// Translation classes of two-point clusters {x, y} with |x - y| <= max_distance,
/// represented by the canonical difference vector rounded to `quantum`.
std::vector<IVec> pair_cluster_census(const DeloneSet& set, double max_distance,
                                      double quantum = 1e-6);

/// CSV with header x0,...,x{d-1}; every coordinate printed with 17
/// significant digits so that reading it back is bit-exact.
void write_points_csv(std::ostream& out, std::span<const Vec> points);
std::vector<Vec> read_points_csv(std::istream& in);

/// Rebuilds a set from CSV. The extent defaults to the bounding box.
DeloneSet import_points_csv(std::istream& in, std::optional<Region> extent = std::nullopt);

inline const double kGoldenRatio = 0.5 * (1.0 + std::sqrt(5.0));

}  // namespace fkq
