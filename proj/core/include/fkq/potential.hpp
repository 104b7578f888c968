#pragma once

#include "fkq/geometry.hpp"
#include "fkq/pointset.hpp"
#include "fkq/types.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace fkq {

enum class PotentialKind { bump_sum, periodic_closed_form };

std::string_view to_string(PotentialKind k);

struct FieldSample {
  double value = 0.0;
  Vec gradient;
  Mat hessian;
};

/// Smooth field V tied to a Delone set (bump sums) or given in closed form
/// (periodic presets), optionally pulled back by x -> A^n x. Immutable; eval
/// is safe to call concurrently.
class PatternPotential {
 public:
  /// V(x) = sign * h * sum_p beta(|x - p| / s), beta(t) = (1 - t^2)^4 on t < 1.
  /// Requires 0 < s <= packing radius so that at most one term is active.
  static PatternPotential bump(std::shared_ptr<const DeloneSet> set, double amplitude,
                               double support_radius, int sign);

  /// "one_minus_cos": V(x) = sum_k (1 - cos x_k).
  static PatternPotential periodic(std::string_view name, int d);

  /// Pull-back by A^n on top of any existing scaling. A defaults to the base
  /// set's self-affinity; periodic potentials must supply it.
  PatternPotential scaled(int n, std::optional<Mat> a = std::nullopt) const;

  FieldSample eval(const Vec& x) const;
  /// Unscaled field, i.e. eval with n = 0.
  FieldSample eval_base(const Vec& y) const;

  PotentialKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double amplitude() const { return amplitude_; }
  double support_radius() const { return support_; }
  int sign() const { return sign_; }
  int scale_power() const { return power_; }
  /// The matrix A (identity when unscaled and none was supplied).
  const Mat& scale_matrix() const { return a_; }
  /// A^n.
  const Mat& pullback() const { return an_; }
  const Mat& pullback_inverse() const { return an_inv_; }
  /// Radius R such that V(x) depends only on the pattern in B_R(x).
  double equivariance_range() const;
  /// Range of the unscaled field.
  double base_range() const;
  const std::shared_ptr<const DeloneSet>& base_set() const { return set_; }
  /// Crude sup |V| bound: |h| for bump sums, 2d for one_minus_cos.
  double value_bound() const;

 private:
  PatternPotential() = default;

  PotentialKind kind_ = PotentialKind::periodic_closed_form;
  std::string name_;
  int dim_ = 0;
  double amplitude_ = 1.0;
  double support_ = 0.0;
  int sign_ = 1;
  int power_ = 0;
  Mat a_, an_, an_inv_;
  std::shared_ptr<const DeloneSet> set_;
  std::shared_ptr<const SpatialHash> hash_;
};

}  // namespace fkq
