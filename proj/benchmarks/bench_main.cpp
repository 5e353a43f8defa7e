#include <benchmark/benchmark.h>

#include <random>

#include "scatgeo/eikonal.hpp"
#include "scatgeo/grid.hpp"
#include "scatgeo/partition.hpp"

namespace {

using namespace scatgeo;

void bm_partition_sum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MassSpec mass(std::vector<double>(n, 1.0));
  PhasePartition pp(mass, 1, select_constants(n));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd x(pp.frame(0).dim());
  for (int i = 0; i < x.size(); ++i) x(i) = gauss(rng);
  x /= std::sqrt(norm_sq(x, pp.frame(0)));
  Eigen::VectorXd r = pp.frame(0).to_positions(x);
  for (auto _ : state) benchmark::DoNotOptimize(pp.sum_J(r));
}
BENCHMARK(bm_partition_sum)->Arg(3)->Arg(4)->Arg(5);

void bm_propagate_step(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  MassSpec mass({2.0, 2.0, 2.0});
  ClusterDecomposition b({{1, 2}, {3}}, 3);
  JacobiFrame frame(mass, b, 1);
  PotentialSpec pot{{{PairIndex(1, 2), PotentialKind::poschl_teller, -1.0}}};
  GridSpec spec(2, 20.0, m);
  Propagator prop(spec, HamiltonianSpec{frame, pot});
  GridState psi = make_gaussian(spec, {0.0, 0.0}, {1.0, 1.0}, {1.0, 0.0});
  for (auto _ : state) prop.propagate(psi, 0.01, 1);
}
BENCHMARK(bm_propagate_step)->Arg(64)->Arg(128)->Arg(256);

void bm_phase_eval(benchmark::State& state) {
  PhaseFunction phase(LongRangeTail{1.0, 0.8},
                      PhaseParams{0.5, 0.5, 16.0, static_cast<int>(state.range(0))});
  double z = 40.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(phase.phase(z, 1.5));
    z += 1e-9;
  }
}
BENCHMARK(bm_phase_eval)->Arg(1)->Arg(2)->Arg(3);

void bm_modifier_apply(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  PhaseFunction phase(LongRangeTail{1.0, 0.8}, PhaseParams{0.5, 0.5, 8.0, 2});
  GridSpec spec(1, 40.0, m);
  Modifier mod(phase, spec);
  GridState psi = make_gaussian(spec, {-20.0}, {2.0}, {2.0});
  for (auto _ : state) benchmark::DoNotOptimize(mod.apply(psi));
}
BENCHMARK(bm_modifier_apply)->Arg(256)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
