#include "cartan/isometry.hpp"
#include "cartan/random.hpp"
#include "cartan/symspace.hpp"

#include <benchmark/benchmark.h>

using namespace cartan;

namespace {

// Arg selects the space: H2, H3, H5, H9, sl(3), sl(4), sl(6).
SpaceId space_arg(const benchmark::State& state) {
  switch (state.range(0)) {
    case 0: return SpaceId::hyperbolic(2);
    case 1: return SpaceId::hyperbolic(3);
    case 2: return SpaceId::hyperbolic(5);
    case 3: return SpaceId::hyperbolic(9);
    case 4: return SpaceId::sl(3);
    case 5: return SpaceId::sl(4);
    default: return SpaceId::sl(6);
  }
}

void label(benchmark::State& state, const SpaceId& s) { state.SetLabel(s.name()); }

}  // namespace

static void BM_Sigma(benchmark::State& state) {
  const SpaceId s = space_arg(state);
  auto rng = seeded(1);
  SolvCoords y{s, uniform_vec(rng, s.dim(), -1, 1)};
  for (auto _ : state) benchmark::DoNotOptimize(sigma(y));
  label(state, s);
}
BENCHMARK(BM_Sigma)->DenseRange(0, 6);

static void BM_SigmaInv(benchmark::State& state) {
  const SpaceId s = space_arg(state);
  auto rng = seeded(2);
  TriangularElement L = sigma(SolvCoords{s, uniform_vec(rng, s.dim(), -1, 1)});
  for (auto _ : state) benchmark::DoNotOptimize(sigma_inv(L));
  label(state, s);
}
BENCHMARK(BM_SigmaInv)->DenseRange(0, 6);

static void BM_CosetDistance(benchmark::State& state) {
  const SpaceId s = space_arg(state);
  auto rng = seeded(3);
  CosetPoint a = to_coset(sigma(SolvCoords{s, uniform_vec(rng, s.dim(), -1, 1)}));
  CosetPoint b = to_coset(sigma(SolvCoords{s, uniform_vec(rng, s.dim(), -1, 1)}));
  for (auto _ : state) benchmark::DoNotOptimize(coset_distance(a, b));
  label(state, s);
}
BENCHMARK(BM_CosetDistance)->DenseRange(0, 6);

static void BM_IsometryAction(benchmark::State& state) {
  const SpaceId s = space_arg(state);
  auto rng = seeded(4);
  SolvCoords u{s, uniform_vec(rng, s.dim(), -1, 1)}, y{s, uniform_vec(rng, s.dim(), -1, 1)};
  GroupElement g = classify_element(sigma(u).matrix, s);
  for (auto _ : state) benchmark::DoNotOptimize(isometry_action(g, y));
  label(state, s);
}
BENCHMARK(BM_IsometryAction)->DenseRange(0, 6);

// Closed-form r = 1 fiber rotation against the generic coset round trip.
static void BM_FiberRotation(benchmark::State& state) {
  const SpaceId s = SpaceId::hyperbolic(static_cast<int>(state.range(0)));
  const bool closed = state.range(1) != 0;
  auto rng = seeded(5);
  const FiberGenerator f = build_fiber_generators(s).front();
  SolvCoords y{s, uniform_vec(rng, s.dim(), -1, 1)};
  for (auto _ : state) {
    if (closed) benchmark::DoNotOptimize(r1_rotate(f.matrix, 0.3, y.values));
    else benchmark::DoNotOptimize(isometry_action(fiber_rotation(f, 0.3), y));
  }
  state.SetLabel(closed ? "closed form" : "coset");
}
BENCHMARK(BM_FiberRotation)->ArgsProduct({{3, 5, 9}, {0, 1}});

BENCHMARK_MAIN();
