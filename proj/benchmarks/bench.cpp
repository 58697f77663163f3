#include <benchmark/benchmark.h>

#include "lightray/forward_model.hpp"
#include "lightray/priors.hpp"
#include "lightray/random.hpp"
#include "lightray/solvers/golub_kahan.hpp"

using namespace lightray;

namespace {

SpaceTimeGrid grid_for(const benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  return build_grid(nx, {-3, 3}, static_cast<int>(state.range(1)), {0, 4});
}

void BM_EnumerateRays(benchmark::State& state) {
  const SpaceTimeGrid g = grid_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_rays(g, RayPolicy::null_shell()));
}

void BM_Assemble(benchmark::State& state) {
  const SpaceTimeGrid g = grid_for(state);
  const auto rays = enumerate_rays(g, RayPolicy::null_shell());
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operator(g, rays));
  state.counters["rays"] = static_cast<double>(rays.size());
}

void BM_Apply(benchmark::State& state) {
  const SpaceTimeGrid g = grid_for(state);
  const SparseOperator A = assemble_operator(g, enumerate_rays(g, RayPolicy::null_shell()));
  const Eigen::VectorXd x = CounterRng(1).normal_vector(A.cols());
  for (auto _ : state) benchmark::DoNotOptimize(A.apply(x));
}

void BM_ApplyAdjoint(benchmark::State& state) {
  const SpaceTimeGrid g = grid_for(state);
  const SparseOperator A = assemble_operator(g, enumerate_rays(g, RayPolicy::null_shell()));
  const Eigen::VectorXd y = CounterRng(2).normal_vector(A.rows());
  for (auto _ : state) benchmark::DoNotOptimize(A.apply_adjoint(y));
}

void BM_CovarianceApply(benchmark::State& state) {
  const SpaceTimeGrid g = grid_for(state);
  const CovarianceOperator Q = build_covariance_operator(g, MaternParams{1.5, 0.05, 1.0});
  const Eigen::VectorXd x = CounterRng(3).normal_vector(static_cast<Eigen::Index>(g.size()));
  for (auto _ : state) benchmark::DoNotOptimize(Q.apply(x));
}

// Cost of 20 bidiagonalization steps, where reorthogonalization grows with k.
void BM_GolubKahan20(benchmark::State& state) {
  const SpaceTimeGrid g = grid_for(state);
  const SparseOperator A = assemble_operator(g, enumerate_rays(g, RayPolicy::null_shell()));
  const Eigen::VectorXd b = CounterRng(4).normal_vector(A.rows());
  for (auto _ : state) {
    GolubKahanState s = golub_kahan_init(b);
    for (int k = 0; k < 20 && golub_kahan_step(A, s); ++k) {
    }
    benchmark::DoNotOptimize(s.alpha.data());
  }
}

}  // namespace

BENCHMARK(BM_EnumerateRays)->Args({25, 10})->Args({51, 20})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Assemble)->Args({25, 10})->Args({51, 20})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Apply)->Args({25, 10})->Args({51, 20})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ApplyAdjoint)->Args({25, 10})->Args({51, 20})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CovarianceApply)->Args({25, 10})->Args({51, 20})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GolubKahan20)->Args({25, 10})->Args({51, 20})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
