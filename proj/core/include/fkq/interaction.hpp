#pragma once

#include "fkq/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fkq {

enum class InteractionFamily {
  potential_only,
  nn_quadratic_1d,
  laplacian_quadratic,
  p_power_1d,
  address_neighborhood
};

std::string_view to_string(InteractionFamily f);

/// Finite set of lattice indices in Z^r: interior slots first, then the
/// frozen collar needed by the interior's interaction terms.
class IndexDomain {
 public:
  IndexDomain() = default;
  IndexDomain(int rank, std::vector<IVec> interior, std::vector<IVec> collar);

  int rank() const { return rank_; }
  std::size_t size() const { return indices_.size(); }
  std::size_t interior_size() const { return interior_; }
  std::size_t collar_size() const { return indices_.size() - interior_; }
  bool is_interior(std::size_t slot) const { return slot < interior_; }
  const IVec& index(std::size_t slot) const { return indices_[slot]; }
  std::span<const IVec> indices() const { return indices_; }
  std::optional<std::size_t> find(const IVec& i) const;

 private:
  struct Less {
    bool operator()(const IVec& a, const IVec& b) const { return lex_less(a, b); }
  };
  int rank_ = 0;
  std::vector<IVec> indices_;
  std::size_t interior_ = 0;
  std::map<IVec, std::size_t, Less> lookup_;
};

/// Type sigma: configurations within distance `radius` of i -> sigma^T i,
/// with sigma an r x d matrix.
struct TypeSpec {
  Mat sigma;
  double radius = 0.0;

  Vec target(const IVec& i) const { return sigma.transpose() * to_vec(i); }
  void validate(int rank, int value_dim) const;
};

/// Finite-range interaction {H_B} on an IndexDomain. Pair terms are counted
/// once per unordered pair: H = |u_i - u_j|^2 / 2 (quadratic families) or
/// |u_i - u_j|^p / p (p_power_1d).
class InteractionModel {
 public:
  static InteractionModel potential_only(int rank, std::vector<IVec> interior, int value_dim);
  /// Interior indices lo..hi, collar {lo - 1, hi + 1}.
  static InteractionModel nn_quadratic_1d(std::int64_t lo, std::int64_t hi, int value_dim = 1);
  /// Interior box [lo, hi] in Z^r with unit-step neighbours.
  static InteractionModel laplacian_quadratic(const IVec& lo, const IVec& hi, int value_dim = 1);
  static InteractionModel p_power_1d(double p, std::int64_t lo, std::int64_t hi);
  /// Neighbours of i are the j in `addresses` with 0 < |j - i| <= tau.
  /// `interior` must be a subset of `addresses`.
  static InteractionModel address_neighborhood(double tau, std::span<const IVec> addresses,
                                               std::span<const IVec> interior, int value_dim = 1);

  InteractionFamily family() const { return family_; }
  int value_dim() const { return value_dim_; }
  int rank() const { return domain_.rank(); }
  const IndexDomain& domain() const { return domain_; }
  double exponent() const { return p_; }
  double tau() const { return tau_; }

  /// Neighbour slots of a slot; for collar slots only neighbours inside the
  /// domain are listed.
  std::span<const std::size_t> neighbor_slots(std::size_t slot) const { return nbrs_[slot]; }
  std::vector<IVec> neighbors(const IVec& i) const;
  std::size_t max_neighbors() const;

  /// Q_i = d/du_i of sum_{B containing i} H_B.
  Vec grad_at(const Configuration& u, std::size_t slot) const;
  /// sum_{B containing i} H_B.
  double local_action(const Configuration& u, std::size_t slot) const;
  /// Diagonal block d^2/du_i^2 of the local action.
  Mat site_hessian(const Configuration& u, std::size_t slot) const;

  /// Upper bound B on |Q_i(u)| + |site Hessian| over configurations within
  /// `spec.radius` of the type-sigma line.
  double hessian_bound(const TypeSpec& spec) const;

 private:
  InteractionModel() = default;
  void link(std::span<const IVec> offsets);

  InteractionFamily family_ = InteractionFamily::potential_only;
  int value_dim_ = 1;
  double p_ = 2.0;
  double tau_ = 0.0;
  IndexDomain domain_;
  std::vector<std::vector<std::size_t>> nbrs_;
  std::vector<IVec> offsets_;
};

/// Integer vectors o with 0 < |o| <= tau in Z^r, lexicographic order.
std::vector<IVec> ball_offsets(int rank, double tau);

}  // namespace fkq
