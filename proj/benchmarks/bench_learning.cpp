#include "cartan/fixtures.hpp"
#include "cartan/homo.hpp"
#include "cartan/net.hpp"
#include "cartan/solver.hpp"
#include "cartan/train.hpp"

#include <benchmark/benchmark.h>

using namespace cartan;

namespace {

NetworkConfig blob_net(int K) {
  NetworkConfig c;
  c.input_dim = 4;
  c.layers = {{3}, {1}};
  c.task = Task::multiclass;
  c.K = K;
  return c;
}

}  // namespace

static void BM_Forward(benchmark::State& state) {
  const NetworkConfig c = blob_net(2);
  const ParamSet p = init_params(c, 1);
  const Dataset d = gen_synthetic(SyntheticKind::blobs, 64, 4, 1);
  for (auto _ : state)
    for (const auto& x : d.features) benchmark::DoNotOptimize(forward(c, p, x));
  state.SetItemsProcessed(state.iterations() * d.size());
}
BENCHMARK(BM_Forward);

static void BM_Gradient(benchmark::State& state) {
  const NetworkConfig c = blob_net(2);
  const ParamSet p = init_params(c, 1);
  const Dataset d = gen_synthetic(SyntheticKind::blobs, 16, 4, 1);
  const auto mode = state.range(0) ? GradientMode::finite_difference : GradientMode::analytic;
  for (auto _ : state) benchmark::DoNotOptimize(gradient(c, p, d, mode));
  state.SetLabel(state.range(0) ? "finite-difference" : "analytic");
  state.SetItemsProcessed(state.iterations() * d.size());
}
BENCHMARK(BM_Gradient)->Arg(0)->Arg(1);

static void BM_TrainBlobs(benchmark::State& state) {
  const NetworkConfig c = blob_net(static_cast<int>(state.range(0)));
  auto [tr, te] = split_dataset(gen_synthetic(SyntheticKind::blobs, 400, 4, 1, c.K));
  TrainConfig t;
  t.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_loop(t, c, tr, te));
}
BENCHMARK(BM_TrainBlobs)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_ConstraintResidual(benchmark::State& state) {
  const ConstraintSystem c =
      build_constraints(mc_for_space(appendix::h3()), mc_for_space(appendix::sl4()));
  const Mat W = appendix::w_can();
  for (auto _ : state) benchmark::DoNotOptimize(residual(W, c));
}
BENCHMARK(BM_ConstraintResidual);

static void BM_SolveHomo(benchmark::State& state) {
  const ConstraintSystem c =
      build_constraints(mc_for_space(appendix::h3()), mc_for_space(appendix::sl4()));
  SolveOptions o;
  o.templates = branch_templates(appendix::h3(), appendix::sl4());
  for (auto _ : state) benchmark::DoNotOptimize(solve_numeric(c, static_cast<int>(state.range(0)), o));
}
BENCHMARK(BM_SolveHomo)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
