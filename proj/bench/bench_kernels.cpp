// Serial reference vs OpenMP kernels on a Heisenberg ball, plus the two solvers
// built on them. Arg 0 = serial, 1 = OpenMP.

#include <benchmark/benchmark.h>

#include <vector>

#include "coarse/kernels.hpp"
#include "coarse/profile.hpp"
#include "coarse/randomwalk.hpp"
#include "coarse/step.hpp"

using namespace coarse;

namespace {

kernels::Backend backend_of(const benchmark::State& state) {
  return state.range(0) == 0 ? kernels::Backend::Serial : kernels::Backend::Parallel;
}

struct Fixture {
  GroupModel g = GroupModel::from_name("heis");
  StepDistribution mu = StepDistribution::uniform(g);
  BallPtr ball = Ball::build(g, 24);
  StepOperator op{*ball, mu};
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Apply(benchmark::State& state) {
  const auto& f = fixture();
  const auto& k = kernels::ops(backend_of(state));
  std::vector<double> in(f.ball->size(), 1.0), out(f.ball->size());
  for (auto _ : state) {
    k.apply(f.op.table(), in, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.ball->size()));
}

void BM_Dot(benchmark::State& state) {
  const auto& f = fixture();
  const auto& k = kernels::ops(backend_of(state));
  std::vector<double> a(f.ball->size(), 0.5), b(f.ball->size(), 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(k.dot(a, b));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.ball->size()));
}

void BM_PowerIteration(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(l2_profile_exact(f.g, 12, f.mu, 1e-10, backend_of(state)).lambda);
}

void BM_ReturnConvolution(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(return_probability_exact(f.mu, 30, ReturnMode::Midpoint, backend_of(state)).back());
}

void BM_MonteCarlo(benchmark::State& state) {
  const auto& f = fixture();
  const auto oracle = LengthOracle::for_reach(f.g, 100);
  for (auto _ : state) {
    const auto s = sample_walks(f.mu, {25, 50, 100}, {2000, 1, backend_of(state)}, oracle, false);
    benchmark::DoNotOptimize(s.length.data());
  }
}

}  // namespace

BENCHMARK(BM_Apply)->Arg(0)->Arg(1);
BENCHMARK(BM_Dot)->Arg(0)->Arg(1);
BENCHMARK(BM_PowerIteration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReturnConvolution)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
