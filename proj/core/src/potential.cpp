#include "fkq/potential.hpp"

#include "fkq/errors.hpp"

#include <cmath>

namespace fkq {

std::string_view to_string(PotentialKind k) {
  return k == PotentialKind::bump_sum ? "bump_sum" : "periodic_closed_form";
}

PatternPotential PatternPotential::bump(std::shared_ptr<const DeloneSet> set, double amplitude,
                                        double support_radius, int sign) {
  if (!set) throw ConfigError("bump potential: no point set");
  if (!(amplitude != 0.0) || !std::isfinite(amplitude))
    throw ConfigError("bump potential: amplitude must be finite and non-zero");
  if (sign != 1 && sign != -1) throw ConfigError("bump potential: sign must be +1 or -1");
  if (!(support_radius > 0.0) || !std::isfinite(support_radius))
    throw ConfigError("bump potential: support radius must be > 0");
  if (support_radius > set->packing_radius() * (1.0 + 1e-12))
    throw OverlapError("bump potential: support radius " + std::to_string(support_radius) +
                       " exceeds packing radius " + std::to_string(set->packing_radius()));
  PatternPotential p;
  p.kind_ = PotentialKind::bump_sum;
  p.name_ = "bump";
  p.dim_ = set->dim();
  p.amplitude_ = amplitude;
  p.support_ = support_radius;
  p.sign_ = sign;
  p.a_ = set->self_affinity() ? *set->self_affinity() : Mat(Mat::Identity(p.dim_, p.dim_));
  p.an_ = Mat::Identity(p.dim_, p.dim_);
  p.an_inv_ = p.an_;
  p.hash_ = std::make_shared<const SpatialHash>(set->points(), support_radius);
  p.set_ = std::move(set);
  return p;
}

PatternPotential PatternPotential::periodic(std::string_view name, int d) {
  if (name != "one_minus_cos") throw ConfigError("unknown periodic potential '" + std::string(name) + "'");
  if (d < 1 || d > kMaxDim) throw ConfigError("periodic potential: dimension must be in [1, 4]");
  PatternPotential p;
  p.kind_ = PotentialKind::periodic_closed_form;
  p.name_ = std::string(name);
  p.dim_ = d;
  p.a_ = Mat::Identity(d, d);
  p.an_ = p.a_;
  p.an_inv_ = p.a_;
  return p;
}

PatternPotential PatternPotential::scaled(int n, std::optional<Mat> a) const {
  if (n < 0) throw PreconditionError("scale: power must be >= 0");
  PatternPotential p = *this;
  if (a) {
    if (a->rows() != dim_ || a->cols() != dim_) throw ConfigError("scale: A must be d x d");
    if (power_ > 0 && !a->isApprox(a_, 1e-14))
      throw PreconditionError("scale: A differs from the matrix already applied");
    p.a_ = *a;
  } else if (n > 0 && power_ == 0 && !(set_ && set_->self_affinity())) {
    throw PreconditionError("scale: no self-affinity matrix available");
  }
  Mat step = Mat::Identity(dim_, dim_);
  for (int k = 0; k < n; ++k) step = p.a_ * step;
  p.power_ = power_ + n;
  p.an_ = step * an_;
  p.an_inv_ = p.an_.inverse();
  return p;
}

FieldSample PatternPotential::eval_base(const Vec& y) const {
  FieldSample out;
  out.gradient = Vec::Zero(dim_);
  out.hessian = Mat::Zero(dim_, dim_);
  if (kind_ == PotentialKind::periodic_closed_form) {
    for (int k = 0; k < dim_; ++k) {
      const double c = std::cos(y[k]);
      out.value += 1.0 - c;
      out.gradient[k] = std::sin(y[k]);
      out.hessian(k, k) = c;
    }
    return out;
  }
  const auto hit = hash_->any_within(y, support_);
  if (!hit) return out;
  const Vec r = y - set_->point(*hit);
  const double s2 = support_ * support_;
  const double w = 1.0 - r.squaredNorm() / s2;
  const double h = sign_ * amplitude_;
  const double w2 = w * w;
  out.value = h * w2 * w2;
  out.gradient = (-8.0 * h * w2 * w / s2) * r;
  out.hessian = (-8.0 * h * w2 * w / s2) * Mat::Identity(dim_, dim_) +
                (48.0 * h * w2 / (s2 * s2)) * (r * r.transpose());
  return out;
}

FieldSample PatternPotential::eval(const Vec& x) const {
  if (power_ == 0) return eval_base(x);
  FieldSample base = eval_base(an_ * x);
  base.gradient = an_.transpose() * base.gradient;
  base.hessian = an_.transpose() * base.hessian * an_;
  return base;
}

double PatternPotential::base_range() const {
  return kind_ == PotentialKind::bump_sum ? support_ : 2.0 * M_PI;
}

double PatternPotential::equivariance_range() const {
  return power_ == 0 ? base_range() : base_range() * op_norm(an_inv_);
}

double PatternPotential::value_bound() const {
  return kind_ == PotentialKind::bump_sum ? std::abs(amplitude_) : 2.0 * dim_;
}

}  // namespace fkq
