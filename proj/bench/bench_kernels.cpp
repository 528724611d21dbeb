#include <benchmark/benchmark.h>

#include <random>

#include "diskcover/kernels.hpp"
#include "diskcover/losses.hpp"
#include "diskcover/synth.hpp"

using namespace diskcover;
using kernels::Exec;

namespace {

DiskSet random_disks(int n, int side) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1 * side, 0.9 * side);
  std::uniform_real_distribution<double> us(2.0, 0.1 * side);
  std::vector<Point> centers;
  std::vector<double> sigmas;
  for (int i = 0; i < n; ++i) {
    centers.push_back({u(rng), u(rng)});
    sigmas.push_back(us(rng));
  }
  return DiskSet(centers, sigmas, make_assoc(n, n, assoc_kind_for(n, n)));
}

template <Exec E>
void BM_Field(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto f = kernels::make_factors(random_disks(static_cast<int>(state.range(1)), side), side, side);
  std::vector<double> out(static_cast<std::size_t>(side) * side);
  for (auto _ : state) {
    kernels::accumulate_field(f, out, E);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side * state.range(1));
}

template <Exec E>
void BM_Moments(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto f = kernels::make_factors(random_disks(static_cast<int>(state.range(1)), side), side, side);
  std::vector<double> w(static_cast<std::size_t>(side) * side, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::reduce_disk_moments(f, w, E));
  state.SetItemsProcessed(state.iterations() * side * side * state.range(1));
}

template <Exec E>
void BM_LossAndGradient(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const DiskSet disks = random_disks(static_cast<int>(state.range(1)), side);
  const BinaryMask gt = generate({ShapeKind::disk, {0.5 * side, 0.5 * side}, 0.3 * side}, side, side);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(disks, gt, LossKind::dice, 1.0, E));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int side : {128, 512}) {
    for (int n : {4, 16, 32}) b->Args({side, n});
  }
}

}  // namespace

BENCHMARK(BM_Field<Exec::serial>)->Apply(sizes);
BENCHMARK(BM_Field<Exec::parallel>)->Apply(sizes)->UseRealTime();
BENCHMARK(BM_Moments<Exec::serial>)->Apply(sizes);
BENCHMARK(BM_Moments<Exec::parallel>)->Apply(sizes)->UseRealTime();
BENCHMARK(BM_LossAndGradient<Exec::serial>)->Apply(sizes);
BENCHMARK(BM_LossAndGradient<Exec::parallel>)->Apply(sizes)->UseRealTime();

BENCHMARK_MAIN();
