#pragma once

// Small builders shared by the unit and acceptance tests.

#include "fkq/interaction.hpp"
#include "fkq/landscape.hpp"
#include "fkq/pointset.hpp"
#include "fkq/potential.hpp"
#include "fkq/solver.hpp"

#include <cmath>
#include <memory>
#include <numbers>

namespace fkq::testing {

inline Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

inline IVec ivec1(std::int64_t x) {
  IVec v(1);
  v << x;
  return v;
}

inline IVec ivec2(std::int64_t x, std::int64_t y) {
  IVec v(2);
  v << x, y;
  return v;
}

inline Region interval(double lo, double hi) { return Region::box(vec1(lo), vec1(hi)); }

inline Mat mat1(double x) { return Mat::Constant(1, 1, x); }

/// one_minus_cos in d = 1 with its atlas on [-half, half] and constants.
struct CosineLandscape {
  std::shared_ptr<const PatternPotential> potential;
  CriticalAtlas atlas;
  LandscapeConstants constants;
};

inline CosineLandscape cosine_landscape(double half_width, int probes = 2) {
  auto p = std::make_shared<const PatternPotential>(PatternPotential::periodic("one_minus_cos", 1));
  auto atlas = find_critical_points(p, interval(-half_width, half_width), 0.5);
  auto c = estimate_constants(atlas, probes);
  return {p, std::move(atlas), c};
}

/// Fibonacci set on [-half, half] with negative bump wells of support s.
struct FibonacciWells {
  std::shared_ptr<const DeloneSet> set;
  std::shared_ptr<const PatternPotential> potential;
  CriticalAtlas atlas;
};

inline FibonacciWells fibonacci_wells(double half_width, double support = 0.5, bool constants = true) {
  auto set = std::make_shared<const DeloneSet>(build_fibonacci(interval(-half_width, half_width)));
  auto p = std::make_shared<const PatternPotential>(PatternPotential::bump(set, 1.0, support, -1));
  auto atlas = find_critical_points(p, set->extent(), support / 4.0);
  if (constants) estimate_constants(atlas, 2);
  return {set, p, std::move(atlas)};
}

}  // namespace fkq::testing
