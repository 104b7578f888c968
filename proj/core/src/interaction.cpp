#include "fkq/interaction.hpp"

#include "fkq/errors.hpp"
#include "fkq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace fkq {

std::string_view to_string(InteractionFamily f) {
  switch (f) {
    case InteractionFamily::potential_only: return "potential_only";
    case InteractionFamily::nn_quadratic_1d: return "nn_quadratic_1d";
    case InteractionFamily::laplacian_quadratic: return "laplacian_quadratic";
    case InteractionFamily::p_power_1d: return "p_power_1d";
    case InteractionFamily::address_neighborhood: return "address_neighborhood";
  }
  return "unknown";
}

IndexDomain::IndexDomain(int rank, std::vector<IVec> interior, std::vector<IVec> collar)
    : rank_(rank), interior_(interior.size()) {
  if (rank < 1 || rank > kMaxDim) throw ConfigError("index domain: rank must be in [1, 4]");
  if (interior.empty()) throw ConfigError("index domain: no interior index");
  indices_ = std::move(interior);
  indices_.insert(indices_.end(), std::make_move_iterator(collar.begin()),
                  std::make_move_iterator(collar.end()));
  for (std::size_t s = 0; s < indices_.size(); ++s) {
    if (indices_[s].size() != rank) throw ConfigError("index domain: index rank mismatch");
    if (!lookup_.emplace(indices_[s], s).second)
      throw ConfigError("index domain: duplicate index");
  }
}

std::optional<std::size_t> IndexDomain::find(const IVec& i) const {
  if (auto it = lookup_.find(i); it != lookup_.end()) return it->second;
  return std::nullopt;
}

void TypeSpec::validate(int rank, int value_dim) const {
  if (sigma.rows() != rank || sigma.cols() != value_dim)
    throw ConfigError("type spec: sigma must be rank x value_dim (" + std::to_string(rank) + " x " +
                      std::to_string(value_dim) + ")");
  if (!sigma.allFinite()) throw ConfigError("type spec: sigma has non-finite entries");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw ConfigError("type spec: radius must be finite and >= 0");
}

std::vector<IVec> ball_offsets(int rank, double tau) {
  const auto reach = static_cast<std::int64_t>(std::floor(tau + 1e-12));
  std::vector<IVec> out;
  IVec o = IVec::Constant(rank, -reach);
  while (true) {
    const auto n2 = o.squaredNorm();
    if (n2 > 0 && std::sqrt(static_cast<double>(n2)) <= tau + 1e-12) out.push_back(o);
    int k = rank - 1;
    for (; k >= 0; --k) {
      if (++o[k] <= reach) break;
      o[k] = -reach;
    }
    if (k < 0) break;
  }
  return out;
}

void InteractionModel::link(std::span<const IVec> offsets) {
  offsets_.assign(offsets.begin(), offsets.end());
  nbrs_.assign(domain_.size(), {});
  for (std::size_t s = 0; s < domain_.size(); ++s) {
    for (const auto& o : offsets) {
      const auto j = domain_.find(domain_.index(s) + o);
      if (j) nbrs_[s].push_back(*j);
    }
  }
}

InteractionModel InteractionModel::potential_only(int rank, std::vector<IVec> interior, int value_dim) {
  InteractionModel m;
  m.family_ = InteractionFamily::potential_only;
  m.value_dim_ = value_dim;
  m.domain_ = IndexDomain(rank, std::move(interior), {});
  m.nbrs_.assign(m.domain_.size(), {});
  return m;
}

InteractionModel InteractionModel::nn_quadratic_1d(std::int64_t lo, std::int64_t hi, int value_dim) {
  if (hi < lo) throw ConfigError("nn_quadratic_1d: empty window");
  if (value_dim < 1 || value_dim > kMaxDim) throw ConfigError("interaction: value_dim must be in [1, 4]");
  std::vector<IVec> interior;
  for (auto i = lo; i <= hi; ++i) interior.push_back(IVec::Constant(1, i));
  InteractionModel m;
  m.family_ = InteractionFamily::nn_quadratic_1d;
  m.value_dim_ = value_dim;
  m.domain_ = IndexDomain(1, std::move(interior), {IVec::Constant(1, lo - 1), IVec::Constant(1, hi + 1)});
  const std::vector<IVec> offsets{IVec::Constant(1, -1), IVec::Constant(1, 1)};
  m.link(offsets);
  return m;
}

InteractionModel InteractionModel::p_power_1d(double p, std::int64_t lo, std::int64_t hi) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw ConfigError("p_power_1d: p must be >= 2");
  InteractionModel m = nn_quadratic_1d(lo, hi, 1);
  m.family_ = InteractionFamily::p_power_1d;
  m.p_ = p;
  return m;
}

InteractionModel InteractionModel::laplacian_quadratic(const IVec& lo, const IVec& hi, int value_dim) {
  const int r = static_cast<int>(lo.size());
  if (r < 1 || r > kMaxDim || hi.size() != r) throw ConfigError("laplacian_quadratic: rank must be in [1, 4]");
  if (value_dim < 1 || value_dim > kMaxDim) throw ConfigError("interaction: value_dim must be in [1, 4]");
  if ((hi.array() < lo.array()).any()) throw ConfigError("laplacian_quadratic: empty window");
  std::vector<IVec> offsets;
  for (int k = 0; k < r; ++k) {
    offsets.push_back(-IVec::Unit(r, k));
    offsets.push_back(IVec::Unit(r, k));
  }
  std::vector<IVec> interior, collar;
  IVec i = lo;
  while (true) {
    interior.push_back(i);
    int k = r - 1;
    for (; k >= 0; --k) {
      if (++i[k] <= hi[k]) break;
      i[k] = lo[k];
    }
    if (k < 0) break;
  }
  auto inside = [&](const IVec& j) { return (j.array() >= lo.array()).all() && (j.array() <= hi.array()).all(); };
  std::set<IVec, bool (*)(const IVec&, const IVec&)> seen([](const IVec& a, const IVec& b) { return lex_less(a, b); });
  for (const auto& x : interior)
    for (const auto& o : offsets) {
      IVec j = x + o;
      if (!inside(j) && seen.insert(j).second) collar.push_back(j);
    }
  std::sort(collar.begin(), collar.end(), [](const IVec& a, const IVec& b) { return lex_less(a, b); });
  InteractionModel m;
  m.family_ = InteractionFamily::laplacian_quadratic;
  m.value_dim_ = value_dim;
  m.domain_ = IndexDomain(r, std::move(interior), std::move(collar));
  m.link(offsets);
  return m;
}

InteractionModel InteractionModel::address_neighborhood(double tau, std::span<const IVec> addresses,
                                                        std::span<const IVec> interior, int value_dim) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("address_neighborhood: tau must be > 0");
  if (interior.empty()) throw ConfigError("address_neighborhood: empty interior");
  if (value_dim < 1 || value_dim > kMaxDim) throw ConfigError("interaction: value_dim must be in [1, 4]");
  const int r = static_cast<int>(interior.front().size());
  auto less = [](const IVec& a, const IVec& b) { return lex_less(a, b); };
  std::set<IVec, decltype(less)> y(addresses.begin(), addresses.end(), less);
  std::set<IVec, decltype(less)> in(interior.begin(), interior.end(), less);
  for (const auto& i : interior)
    if (!y.count(i)) throw ConfigError("address_neighborhood: interior index outside the address set");
  const auto offsets = ball_offsets(r, tau);
  std::set<IVec, decltype(less)> collar(less);
  for (const auto& i : interior)
    for (const auto& o : offsets) {
      IVec j = i + o;
      if (y.count(j) && !in.count(j)) collar.insert(j);
    }
  InteractionModel m;
  m.family_ = InteractionFamily::address_neighborhood;
  m.value_dim_ = value_dim;
  m.tau_ = tau;
  m.domain_ = IndexDomain(r, std::vector<IVec>(interior.begin(), interior.end()),
                          std::vector<IVec>(collar.begin(), collar.end()));
  m.link(offsets);
  return m;
}

std::vector<IVec> InteractionModel::neighbors(const IVec& i) const {
  const auto s = domain_.find(i);
  if (!s) throw PreconditionError("neighbors: index outside the domain");
  std::vector<IVec> out;
  for (auto j : nbrs_[*s]) out.push_back(domain_.index(j));
  return out;
}

std::size_t InteractionModel::max_neighbors() const {
  std::size_t n = 0;
  for (std::size_t s = 0; s < domain_.interior_size(); ++s) n = std::max(n, nbrs_[s].size());
  return n;
}

Vec InteractionModel::grad_at(const Configuration& u, std::size_t slot) const {
  if (u.size() != domain_.size()) throw PreconditionError("grad_at: configuration does not match the domain");
  Vec q = Vec::Zero(value_dim_);
  if (family_ == InteractionFamily::p_power_1d) {
    for (auto j : nbrs_[slot]) {
      const double t = u[slot][0] - u[j][0];
      q[0] += std::pow(std::abs(t), p_ - 2.0) * t;
    }
    return q;
  }
  for (auto j : nbrs_[slot]) q += u[slot] - u[j];
  return q;
}

double InteractionModel::local_action(const Configuration& u, std::size_t slot) const {
  double a = 0.0;
  for (auto j : nbrs_[slot]) {
    if (family_ == InteractionFamily::p_power_1d)
      a += std::pow(std::abs(u[slot][0] - u[j][0]), p_) / p_;
    else
      a += 0.5 * (u[slot] - u[j]).squaredNorm();
  }
  return a;
}

Mat InteractionModel::site_hessian(const Configuration& u, std::size_t slot) const {
  if (family_ == InteractionFamily::p_power_1d) {
    double h = 0.0;
    for (auto j : nbrs_[slot]) h += (p_ - 1.0) * std::pow(std::abs(u[slot][0] - u[j][0]), p_ - 2.0);
    return Mat::Constant(1, 1, h);
  }
  return static_cast<double>(nbrs_[slot].size()) * Mat(Mat::Identity(value_dim_, value_dim_));
}

double InteractionModel::hessian_bound(const TypeSpec& spec) const {
  spec.validate(rank(), value_dim_);
  const double R = spec.radius;
  switch (family_) {
    case InteractionFamily::potential_only:
      return 0.0;
    case InteractionFamily::nn_quadratic_1d:
      return 4.0 * R + 2.0;
    case InteractionFamily::laplacian_quadratic: {
      const double r = rank();
      return 4.0 * r * R + 2.0 * r;
    }
    case InteractionFamily::address_neighborhood: {
      double c = 0.0;
      for (const auto& o : offsets_) c = std::max(c, (spec.sigma.transpose() * to_vec(o)).norm());
      const double n = static_cast<double>(max_neighbors());
      return n * (2.0 * R + c) + n + 1.0;
    }
    case InteractionFamily::p_power_1d: {
      // |Q| + |H| as a function of the deviations (d_{i-1}, d_i, d_{i+1})
      // from the type line, each in [-R, R].
      const double m = spec.sigma(0, 0);
      const double p = p_;
      auto f = [&](const Vec& d) {
        if (d.cwiseAbs().maxCoeff() > R * (1.0 + 1e-15)) return -std::numeric_limits<double>::infinity();
        const double a = m + d[1] - d[0];   // u_i - u_{i-1}
        const double b = -m + d[1] - d[2];  // u_i - u_{i+1}
        const double q = std::pow(std::abs(a), p - 2.0) * a + std::pow(std::abs(b), p - 2.0) * b;
        const double h = (p - 1.0) * (std::pow(std::abs(a), p - 2.0) + std::pow(std::abs(b), p - 2.0));
        return std::abs(q) + h;
      };
      double best = 0.0;
      for (int mask = 0; mask < 8; ++mask) {
        Vec d(3);
        for (int k = 0; k < 3; ++k) d[k] = (mask >> k) & 1 ? R : -R;
        best = std::max(best, f(d));
      }
      if (R > 0.0) {
        std::mt19937_64 rng(0xb0b);
        std::uniform_real_distribution<double> unif(-R, R);
        for (int start = 0; start < 64; ++start) {
          Vec d(3);
          for (int k = 0; k < 3; ++k) d[k] = unif(rng);
          best = std::max(best, f(nelder_mead_maximize(f, d, 0.25 * R)));
        }
      } else {
        best = std::max(best, f(Vec::Zero(3)));
      }
      return best;
    }
  }
  return 0.0;
}

}  // namespace fkq
