#include <benchmark/benchmark.h>

#include "imscat/forward.hpp"
#include "imscat/jacobian.hpp"
#include "imscat/kalman.hpp"
#include "imscat/observation.hpp"

namespace {

using namespace imscat;

ForwardModel make_model(int fine) {
  const CellGrid g = make_grid(3.0, 8);
  return ForwardModel(g, make_fine_grid(g, fine), 3.0);
}

Medium b1() { return characteristic_medium(ShapeId{ShapeTag::B1}, make_grid(3.0, 8)); }

void BM_ForwardSolve(benchmark::State& state) {
  const ForwardModel model = make_model(static_cast<int>(state.range(0)));
  const Medium q = b1();
  const Vec2 dir(1.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lippmann_schwinger(model, q, dir));
}
BENCHMARK(BM_ForwardSolve)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_KernelApply(benchmark::State& state) {
  const ForwardModel model = make_model(static_cast<int>(state.range(0)));
  const auto n = static_cast<Eigen::Index>(model.fine().support_size());
  const CVector v = CVector::Random(n);
  CVector out(n);
  for (auto _ : state) {
    model.kernel().apply(v, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_KernelApply)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_JacobianAssembly(benchmark::State& state) {
  const ForwardModel model = make_model(128);
  const Medium q = b1();
  const DirectionSet dirs = make_directions(30);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_frechet(model, q, dirs, dirs));
}
BENCHMARK(BM_JacobianAssembly)->Unit(benchmark::kMillisecond);

void BM_KalmanSweep(benchmark::State& state) {
  const ForwardModel model = make_model(128);
  const ScatteringObservation obs(model, 30, 30);
  const CVector base = CVector::Zero(static_cast<Eigen::Index>(obs.state_dim()));
  const Linearization lin = obs.linearize(base);
  const CMatrix data = CMatrix::Random(30, 30);
  const auto dim = static_cast<Eigen::Index>(obs.state_dim());
  for (auto _ : state) {
    FilterState s{base, CMatrix::Identity(dim, dim) / 10.0, 0, 0};
    benchmark::DoNotOptimize(kfl_sweep(s, data, lin, base, WeightOperator{}));
  }
}
BENCHMARK(BM_KalmanSweep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
