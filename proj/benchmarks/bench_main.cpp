#include "fkq/interaction.hpp"
#include "fkq/landscape.hpp"
#include "fkq/pointset.hpp"
#include "fkq/potential.hpp"
#include "fkq/solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

namespace {

fkq::Region interval(double lo, double hi) {
  fkq::Vec a(1), b(1);
  a << lo;
  b << hi;
  return fkq::Region::box(a, b);
}

void BM_FibonacciEnumeration(benchmark::State& state) {
  const double half = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fkq::build_fibonacci(interval(-half, half)).size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FibonacciEnumeration)->Arg(1000)->Arg(10000);

void BM_AmmannBeenkerEnumeration(benchmark::State& state) {
  fkq::Vec c = fkq::Vec::Zero(2);
  for (auto _ : state)
    benchmark::DoNotOptimize(fkq::build_ammann_beenker(fkq::Region::ball(c, static_cast<double>(state.range(0)))).size());
}
BENCHMARK(BM_AmmannBeenkerEnumeration)->Arg(30)->Arg(60);

void BM_BumpEval(benchmark::State& state) {
  auto set = std::make_shared<const fkq::DeloneSet>(fkq::build_fibonacci(interval(-1000, 1000)));
  const auto p = fkq::PatternPotential::bump(set, 1.0, 0.5, -1);
  fkq::Vec x(1);
  double t = -900.0;
  for (auto _ : state) {
    x[0] = t;
    benchmark::DoNotOptimize(p.eval(x).value);
    t = t > 900.0 ? -900.0 : t + 0.37;
  }
}
BENCHMARK(BM_BumpEval);

void BM_CosineAtlas(benchmark::State& state) {
  auto p = std::make_shared<const fkq::PatternPotential>(fkq::PatternPotential::periodic("one_minus_cos", 1));
  for (auto _ : state)
    benchmark::DoNotOptimize(fkq::find_critical_points(p, interval(-510, 510), 0.5).size());
}
BENCHMARK(BM_CosineAtlas);

void BM_ClassicalSolve(benchmark::State& state) {
  auto p = std::make_shared<const fkq::PatternPotential>(fkq::PatternPotential::periodic("one_minus_cos", 1));
  auto atlas = fkq::find_critical_points(p, interval(-510, 510), 0.5);
  fkq::estimate_constants(atlas, 2);
  const auto model = fkq::InteractionModel::nn_quadratic_1d(-100, 100);
  const fkq::TypeSpec spec{fkq::Mat::Constant(1, 1, 5.0), M_PI};
  const auto mode = fkq::SolveMode::magnified(20.0);
  const auto coding = fkq::build_coding(atlas, spec, model, mode);
  for (auto _ : state) benchmark::DoNotOptimize(fkq::solve(model, atlas, coding, mode).iterations);
}
BENCHMARK(BM_ClassicalSolve)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
