#include "fixtures.hpp"
#include "oracles.hpp"

#include "fkq/errors.hpp"
#include "fkq/interaction.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace fkq;
using namespace fkq::testing;

namespace {

const double kPi = std::numbers::pi;

Configuration along(const InteractionModel& m, const std::function<Vec(const IVec&)>& f) {
  Configuration u;
  for (const auto& i : m.domain().indices()) u.push_back(f(i));
  return u;
}

std::size_t slot(const InteractionModel& m, const IVec& i) { return *m.domain().find(i); }

struct Family {
  std::string name;
  InteractionModel model;
  TypeSpec spec;
};

std::vector<Family> families() {
  std::vector<Family> out;
  out.push_back({"nn", InteractionModel::nn_quadratic_1d(-10, 10), {mat1(2.5), kPi}});
  out.push_back({"nn-d2", InteractionModel::nn_quadratic_1d(-6, 6, 2), {Mat::Constant(1, 2, 0.7), 0.8}});
  Mat s2(2, 1);
  s2 << 5.0, 3.0;
  out.push_back({"laplacian", InteractionModel::laplacian_quadratic(ivec2(-4, -4), ivec2(4, 4)), {s2, kPi}});
  out.push_back({"p4", InteractionModel::p_power_1d(4.0, -8, 8), {mat1(1.0), 0.6}});
  out.push_back({"p3", InteractionModel::p_power_1d(3.0, -8, 8), {mat1(-0.5), 0.4}});
  std::vector<IVec> all, inner;
  for (int a = -6; a <= 6; ++a)
    for (int b = -6; b <= 6; ++b)
      if ((a * 7 + b * 3) % 4 != 0) {  // a sparse, irregular address set
        all.push_back(ivec2(a, b));
        if (std::abs(a) <= 3 && std::abs(b) <= 3) inner.push_back(ivec2(a, b));
      }
  Mat psi(2, 1);
  psi << 1.0, kPhi;
  out.push_back({"address", InteractionModel::address_neighborhood(2.0, all, inner), {psi, 0.9}});
  return out;
}

Configuration random_typed(const Family& f, Gen& g) {
  const int d = f.model.value_dim();
  return along(f.model, [&](const IVec& i) {
    Vec dev = g.vec(d, -1.0, 1.0);
    if (dev.norm() > 1.0) dev /= dev.norm();
    return Vec(f.spec.target(i) + dev * f.spec.radius * g.uniform(0.0, 1.0));
  });
}

}  // namespace

TEST(Neighbors, Examples) {
  const auto nn = InteractionModel::nn_quadratic_1d(0, 10);
  const auto n5 = nn.neighbors(ivec1(5));
  ASSERT_EQ(n5.size(), 2u);
  EXPECT_EQ(n5[0][0], 4);
  EXPECT_EQ(n5[1][0], 6);
  const auto lap = InteractionModel::laplacian_quadratic(ivec2(-2, -2), ivec2(2, 2));
  auto n0 = lap.neighbors(ivec2(0, 0));
  std::sort(n0.begin(), n0.end(), [](const IVec& a, const IVec& b) { return lex_less(a, b); });
  ASSERT_EQ(n0.size(), 4u);
  EXPECT_EQ(n0[0], ivec2(-1, 0));
  EXPECT_EQ(n0[1], ivec2(0, -1));
  EXPECT_EQ(n0[2], ivec2(0, 1));
  EXPECT_EQ(n0[3], ivec2(1, 0));
  EXPECT_THROW(nn.neighbors(ivec1(50)), PreconditionError);
  EXPECT_EQ(nn.domain().collar_size(), 2u);
  EXPECT_EQ(lap.domain().collar_size(), 20u);
}

TEST(Neighbors, AddressModelOnFibonacci) {
  const auto s = build_fibonacci(interval(-60.0, 60.0));
  const auto t = address_map(s);
  std::vector<IVec> inner;
  for (std::size_t k = 0; k < s.size(); ++k)
    if (std::abs(s.point(k)[0]) <= 40.0) inner.push_back(t.addresses[k]);
  const auto m = InteractionModel::address_neighborhood(2.0, t.addresses, inner);
  EXPECT_EQ(ball_offsets(2, 2.0).size(), 12u);
  for (std::size_t k = 0; k < m.domain().interior_size(); ++k) {
    const auto nb = m.neighbors(m.domain().index(k));
    EXPECT_GE(nb.size(), 1u);
    EXPECT_LE(nb.size(), 12u);
    // brute force over the address list
    std::size_t count = 0;
    for (const auto& j : t.addresses) {
      const double dist = to_vec(IVec(j - m.domain().index(k))).norm();
      if (dist > 0.0 && dist <= 2.0) ++count;
    }
    EXPECT_EQ(nb.size(), count);
  }
}

TEST(Neighbors, Symmetric) {
  for (const auto& f : families()) {
    const auto& dom = f.model.domain();
    for (std::size_t s = 0; s < dom.size(); ++s)
      for (auto t : f.model.neighbor_slots(s)) {
        const auto back = f.model.neighbor_slots(t);
        EXPECT_NE(std::find(back.begin(), back.end(), s), back.end()) << f.name;
      }
  }
}

TEST(Gradient, Examples) {
  const auto nn = InteractionModel::nn_quadratic_1d(-5, 5);
  const auto lin = along(nn, [](const IVec& i) { return vec1(3.0 * static_cast<double>(i[0])); });
  const auto sq = along(nn, [](const IVec& i) { return vec1(static_cast<double>(i[0] * i[0])); });
  for (std::size_t s = 0; s < nn.domain().interior_size(); ++s) {
    EXPECT_DOUBLE_EQ(nn.grad_at(lin, s)[0], 0.0);
    EXPECT_DOUBLE_EQ(nn.grad_at(sq, s)[0], -2.0);
  }
  const auto pp = InteractionModel::p_power_1d(4.0, 0, 0);
  const auto bump = along(pp, [](const IVec& i) { return vec1(i[0] == 0 ? 1.0 : 0.0); });
  EXPECT_DOUBLE_EQ(pp.grad_at(bump, slot(pp, ivec1(0)))[0], 2.0);
}

TEST(Gradient, MatchesDifferencedLocalAction) {
  Gen g(41);
  for (const auto& f : families()) {
    for (int trial = 0; trial < 200; ++trial) {
      auto u = random_typed(f, g);
      const auto s = static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(f.model.domain().interior_size()) - 1));
      const Vec q = f.model.grad_at(u, s);
      const Vec fd = fd_gradient(
          [&](const Vec& v) {
            auto w = u;
            w[s] = v;
            return f.model.local_action(w, s);
          },
          u[s], 1e-5);
      ASSERT_LE((q - fd).norm(), 1e-6 * std::max(1.0, q.norm())) << f.name;
      const Mat h = f.model.site_hessian(u, s);
      const Mat fdh = fd_jacobian(
          [&](const Vec& v) {
            auto w = u;
            w[s] = v;
            return f.model.grad_at(w, s);
          },
          u[s], 1e-5);
      ASSERT_LE((h - fdh).norm(), 1e-6 * std::max(1.0, h.norm())) << f.name;
    }
  }
}

TEST(Gradient, CrossBlocksSymmetric) {
  Gen g(42);
  for (const auto& f : families()) {
    for (int trial = 0; trial < 50; ++trial) {
      auto u = random_typed(f, g);
      const auto i = static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(f.model.domain().interior_size()) - 1));
      const auto nb = f.model.neighbor_slots(i);
      const auto j = nb[static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(nb.size()) - 1))];
      if (!f.model.domain().is_interior(j)) continue;
      auto cross = [&](std::size_t a, std::size_t b) {
        return fd_jacobian(
            [&](const Vec& v) {
              auto w = u;
              w[b] = v;
              return f.model.grad_at(w, a);
            },
            u[b], 1e-5);
      };
      const Mat hij = cross(i, j), hji = cross(j, i);
      ASSERT_LE((hij - hji.transpose()).norm(), 1e-6 * std::max(1.0, hij.norm())) << f.name;
    }
  }
}

TEST(Bound, ClosedForms) {
  const auto nn = InteractionModel::nn_quadratic_1d(-10, 10);
  EXPECT_NEAR(nn.hessian_bound({mat1(5.0), kPi}), 4.0 * kPi + 2.0, 1e-12);
  EXPECT_NEAR(4.0 * kPi + 2.0, 14.566, 1e-3);
  EXPECT_NEAR(nn.hessian_bound({mat1(5.0), 0.0}), 2.0, 1e-12);
  const auto lap1 = InteractionModel::laplacian_quadratic(ivec1(-10), ivec1(10));
  EXPECT_NEAR(lap1.hessian_bound({mat1(5.0), 1.3}), 4.0 * 1.3 + 2.0, 1e-12);
  Mat s2(2, 1);
  s2 << 1.0, 2.0;
  const auto lap2 = InteractionModel::laplacian_quadratic(ivec2(-3, -3), ivec2(3, 3));
  EXPECT_NEAR(lap2.hessian_bound({s2, 0.5}), 8.0 * 0.5 + 4.0, 1e-12);
}

TEST(Bound, NearestNeighbourBoundIsAttained) {
  // Alternating deviations +R, -R, +R give |Q| = 4R exactly.
  const auto nn = InteractionModel::nn_quadratic_1d(-3, 3);
  const double r = 0.7;
  auto u = along(nn, [&](const IVec& i) { return vec1(2.0 * static_cast<double>(i[0]) + (i[0] % 2 == 0 ? r : -r)); });
  const auto s = slot(nn, ivec1(0));
  EXPECT_NEAR(nn.grad_at(u, s).norm() + op_norm(nn.site_hessian(u, s)), nn.hessian_bound({mat1(2.0), r}), 1e-12);
}

TEST(Bound, SoundOnRandomTypedConfigurations) {
  Gen g(43);
  for (const auto& f : families()) {
    const double b = f.model.hessian_bound(f.spec);
    double worst = 0.0;
    Configuration u;
    for (int trial = 0; trial < 10000; ++trial) {
      // Only the slot's closed neighbourhood matters; resample everything
      // every 50 draws to keep this cheap.
      if (trial % 50 == 0) u = random_typed(f, g);
      const auto s = static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(f.model.domain().interior_size()) - 1));
      Vec dev = g.vec(f.model.value_dim(), -1.0, 1.0);
      if (dev.norm() > 1.0) dev /= dev.norm();
      u[s] = f.spec.target(f.model.domain().index(s)) + dev * f.spec.radius;
      worst = std::max(worst, f.model.grad_at(u, s).norm() + op_norm(f.model.site_hessian(u, s)));
    }
    EXPECT_LE(worst, b * (1.0 + 1e-12)) << f.name;
  }
}

TEST(TypeSpec, Validation) {
  TypeSpec ok{mat1(1.0), 1.0};
  EXPECT_NO_THROW(ok.validate(1, 1));
  EXPECT_THROW(ok.validate(2, 1), ConfigError);
  TypeSpec neg{mat1(1.0), -1.0};
  EXPECT_THROW(neg.validate(1, 1), ConfigError);
  TypeSpec nan{mat1(std::nan("")), 1.0};
  EXPECT_THROW(nan.validate(1, 1), ConfigError);
}

TEST(InteractionModel, ConstructionErrors) {
  EXPECT_THROW(InteractionModel::nn_quadratic_1d(3, 2), ConfigError);
  EXPECT_THROW(InteractionModel::p_power_1d(1.5, 0, 3), ConfigError);
  std::vector<IVec> all{ivec2(0, 0)}, inner{ivec2(1, 1)};
  EXPECT_THROW(InteractionModel::address_neighborhood(2.0, all, inner), ConfigError);
}

TEST(InteractionModel, PotentialOnlyHasNoNeighbours) {
  const auto m = InteractionModel::potential_only(1, {ivec1(0), ivec1(1)}, 1);
  EXPECT_EQ(m.max_neighbors(), 0u);
  Configuration u{vec1(3.0), vec1(-1.0)};
  EXPECT_EQ(m.grad_at(u, 0)[0], 0.0);
  EXPECT_EQ(m.hessian_bound({mat1(1.0), 5.0}), 0.0);
}
