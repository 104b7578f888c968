#include "fixtures.hpp"
#include "oracles.hpp"

#include "fkq/errors.hpp"
#include "fkq/potential.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace fkq;
using namespace fkq::testing;

namespace {

std::shared_ptr<const DeloneSet> fib(double half) {
  return std::make_shared<const DeloneSet>(build_fibonacci(interval(-half, half)));
}

std::shared_ptr<const DeloneSet> ab(double radius) {
  return std::make_shared<const DeloneSet>(build_ammann_beenker(Region::ball(vec2(0, 0), radius)));
}

// Reference bump sum written out directly over all points.
double brute_bump(const DeloneSet& s, double h, double support, int sign, const Vec& x) {
  double v = 0.0;
  for (const auto& p : s.points()) {
    const double t = (x - p).norm() / support;
    if (t < 1.0) v += std::pow(1.0 - t * t, 4);
  }
  return sign * h * v;
}

void expect_derivatives_match(const PatternPotential& p, const std::vector<Vec>& xs) {
  // Step and error floor in the unscaled field's units (see the acceptance suite).
  const double unit = std::max(1.0, op_norm(p.pullback()));
  const double h = 1e-5 / unit;
  for (const auto& x : xs) {
    const auto s = p.eval(x);
    const Vec g = fd_gradient([&](const Vec& v) { return p.eval(v).value; }, x, h);
    const Mat hh = fd_jacobian([&](const Vec& v) { return p.eval(v).gradient; }, x, h);
    ASSERT_LE((s.gradient - g).norm(), 1e-6 * std::max(unit, s.gradient.norm())) << x.transpose();
    ASSERT_LE((s.hessian - hh).norm(), 1e-6 * std::max(unit * unit, s.hessian.norm())) << x.transpose();
    ASSERT_LE((s.hessian - s.hessian.transpose()).norm(), 1e-12);
  }
}

std::vector<Vec> near_points(const DeloneSet& s, const Mat& pull_inv, double support, Gen& g, int n) {
  std::vector<Vec> xs;
  for (int k = 0; k < n; ++k) {
    const auto& q = s.point(static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(s.size()) - 1)));
    xs.push_back(pull_inv * (q + g.unit(s.dim()) * g.uniform(0.0, 1.2 * support)));
  }
  return xs;
}

}  // namespace

TEST(Bump, ValueAtSetPointIsSignedAmplitude) {
  const auto s = fib(30.0);
  const auto p = PatternPotential::bump(s, 0.8, 0.4, -1);
  for (const auto& q : s->points()) EXPECT_DOUBLE_EQ(p.eval(q).value, -0.8);
  const auto up = PatternPotential::bump(s, 0.8, 0.4, 1);
  EXPECT_DOUBLE_EQ(up.eval(s->point(3)).value, 0.8);
}

TEST(Bump, AgreesWithDirectSum) {
  const auto s = ab(8.0);
  const auto p = PatternPotential::bump(s, 1.3, 0.35, 1);
  Gen g(3);
  for (int k = 0; k < 500; ++k) {
    const Vec x = g.vec(2, -6, 6);
    EXPECT_NEAR(p.eval(x).value, brute_bump(*s, 1.3, 0.35, 1, x), 1e-14);
  }
}

TEST(Bump, HessianAtWellIsIsotropic) {
  const auto s = ab(6.0);
  const auto p = PatternPotential::bump(s, 2.0, 0.3, -1);
  const auto f = p.eval(s->point(0));
  // beta''(0) = -8 / s^2, sign -1 makes a minimum
  EXPECT_NEAR((f.hessian - Mat::Identity(2, 2) * (8.0 * 2.0 / 0.09)).norm(), 0.0, 1e-9);
}

TEST(Bump, OverlappingSupportsRejected) {
  const auto s = fib(20.0);
  EXPECT_THROW(PatternPotential::bump(s, 1.0, 0.51, 1), OverlapError);
  EXPECT_NO_THROW(PatternPotential::bump(s, 1.0, 0.5, 1));
  EXPECT_THROW(PatternPotential::bump(s, 1.0, 0.0, 1), Error);
}

TEST(Bump, DerivativesMatchFiniteDifferences) {
  Gen g(21);
  const auto s1 = fib(40.0);
  const auto p1 = PatternPotential::bump(s1, 1.0, 0.5, -1);
  expect_derivatives_match(p1, near_points(*s1, p1.pullback_inverse(), 0.5, g, 300));
  const auto s2 = ab(10.0);
  const auto p2 = PatternPotential::bump(s2, 0.7, 0.3, 1);
  expect_derivatives_match(p2, near_points(*s2, p2.pullback_inverse(), 0.3, g, 300));
}

TEST(Periodic, ClosedForm) {
  const auto p = PatternPotential::periodic("one_minus_cos", 2);
  Gen g(4);
  for (int k = 0; k < 200; ++k) {
    const Vec x = g.vec(2, -3.5, 3.5);
    const auto f = p.eval(x);
    EXPECT_NEAR(f.value, 2.0 - taylor_cos(x[0]) - taylor_cos(x[1]), 1e-12);
    EXPECT_NEAR(f.gradient[0], taylor_sin(x[0]), 1e-12);
    EXPECT_NEAR(f.hessian(1, 1), taylor_cos(x[1]), 1e-12);
    EXPECT_EQ(f.hessian(0, 1), 0.0);
  }
  EXPECT_THROW(PatternPotential::periodic("sawtooth", 1), ConfigError);
}

TEST(Periodic, DerivativesMatchFiniteDifferences) {
  Gen g(5);
  std::vector<Vec> xs;
  for (int k = 0; k < 300; ++k) xs.push_back(g.vec(3, -10, 10));
  expect_derivatives_match(PatternPotential::periodic("one_minus_cos", 3), xs);
}

TEST(Scaled, ZeroPowerIsIdentity) {
  const auto s = fib(20.0);
  const auto p = PatternPotential::bump(s, 1.0, 0.5, -1);
  const auto q = p.scaled(0);
  Gen g(6);
  for (int k = 0; k < 200; ++k) {
    const Vec x = g.vec(1, -15, 15);
    EXPECT_EQ(p.eval(x).value, q.eval(x).value);
    EXPECT_EQ(p.eval(x).gradient[0], q.eval(x).gradient[0]);
  }
}

TEST(Scaled, ChainRule) {
  const auto s = fib(60.0);
  const auto p = PatternPotential::bump(s, 1.0, 0.5, -1);
  const auto q1 = p.scaled(1);
  const auto q2 = p.scaled(2);
  Gen g(8);
  for (const auto& x : near_points(*s, q1.pullback_inverse(), 0.5, g, 200)) {
    const auto b = p.eval(x * kPhi);
    const auto f = q1.eval(x);
    EXPECT_NEAR(f.value, b.value, 1e-14);
    EXPECT_NEAR(f.gradient[0], kPhi * b.gradient[0], 1e-12);
  }
  for (const auto& z : s->points()) {
    if (std::abs(z[0]) > 40.0) continue;
    // critical point at z / phi^n with Hessian scaled by phi^(2n)
    EXPECT_NEAR(q1.eval(z / kPhi).gradient[0], 0.0, 1e-12);
    const auto f = q2.eval(z / (kPhi * kPhi));
    EXPECT_NEAR(f.gradient[0], 0.0, 1e-12);
    EXPECT_NEAR(f.hessian(0, 0), std::pow(kPhi, 4) * p.eval(z).hessian(0, 0), 1e-9);
  }
  // Finite differences on the doubly scaled field.
  expect_derivatives_match(q2, near_points(*s, q2.pullback_inverse(), 0.5, g, 200));
}

TEST(Scaled, PeriodicNeedsMatrix) {
  const auto p = PatternPotential::periodic("one_minus_cos", 1);
  EXPECT_THROW(p.scaled(1), Error);
  const auto q = p.scaled(2, mat1(2.0));
  EXPECT_NEAR(q.eval(vec1(0.3)).gradient[0], 4.0 * std::sin(1.2), 1e-14);
  EXPECT_NEAR(q.equivariance_range(), p.equivariance_range() / 4.0, 1e-12);
}

TEST(Properties, PatternEquivariance) {
  // Points with the same local pattern (up to translation) within the range
  // have equal values.
  const auto s = fib(120.0);
  const auto p = PatternPotential::bump(s, 1.0, 0.5, -1);
  const double r = p.equivariance_range();
  Gen g(9);
  int matched = 0;
  for (int k = 0; k < 300; ++k) {
    const Vec x = g.vec(1, -100, 100);
    const auto px = s->local_pattern(x, r);
    for (int tries = 0; tries < 200; ++tries) {
      const auto& q = s->point(static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(s->size()) - 1)));
      const Vec y = q + (x - s->point(*s->index().nearest(x)));
      const auto py = s->local_pattern(y, r);
      if (py.size() != px.size()) continue;
      bool same = true;
      for (std::size_t j = 0; j < px.size(); ++j) same = same && (px[j] - py[j]).norm() < 1e-12;
      if (!same) continue;
      EXPECT_NEAR(p.eval(x).value, p.eval(y).value, 1e-9);
      ++matched;
      break;
    }
  }
  EXPECT_GT(matched, 100);
}

TEST(Properties, Boundedness) {
  Gen g(10);
  const auto s = ab(10.0);
  const auto p = PatternPotential::bump(s, 1.7, 0.38, -1);
  const auto c = PatternPotential::periodic("one_minus_cos", 2);
  for (int k = 0; k < 5000; ++k) {
    const Vec x = g.vec(2, -8, 8);
    EXPECT_LE(std::abs(p.eval(x).value), 1.7 + 1e-12);
    EXPECT_LE(std::abs(c.eval(x * 10.0).value), 4.0);
  }
  EXPECT_DOUBLE_EQ(p.value_bound(), 1.7);
  EXPECT_DOUBLE_EQ(c.value_bound(), 4.0);
}
