#include <benchmark/benchmark.h>

#include <vector>

#include "metaduct/forward_oracle.hpp"
#include "metaduct/io/commands.hpp"
#include "metaduct/modal_coupling.hpp"
#include "metaduct/retrieval.hpp"
#include "metaduct/specfun.hpp"

using namespace metaduct;

namespace {

const MediumProperties kAir{};
const DuctGeometry kSample1{0.04, 0.07, 0.0052};

io::RunConfig sample1_config(int count) {
  io::RunConfig cfg;
  cfg.geometry = kSample1;
  cfg.has_material = true;
  cfg.n1 = 5.0;
  cfg.z1_over_z2 = 15.0;
  cfg.sweep_count = count;
  return cfg;
}

void BM_J1Roots(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(specfun::j1_roots(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_J1Roots)->Arg(4096);

void BM_Coupling(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ModalBasis basis(kSample1, n);
  CouplingOptions opt;
  opt.modes = n;
  opt.check_convergence = false;
  for (auto _ : state) benchmark::DoNotOptimize(coupling_coefficients(basis, kAir, 1000.0, opt));
}
BENCHMARK(BM_Coupling)->Arg(256)->Arg(4096);

void BM_RetrieveSweep(benchmark::State& state) {
  const auto cfg = sample1_config(static_cast<int>(state.range(0)));
  const auto freqs = cfg.frequencies();
  const auto sweep = io::forward_sweep_averaged(cfg, freqs);
  for (auto _ : state) benchmark::DoNotOptimize(retrieve_sweep(sweep, cfg.geometry, cfg.medium, cfg.retrieval()));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(freqs.size()));
}
BENCHMARK(BM_RetrieveSweep)->Arg(45)->Unit(benchmark::kMillisecond);

void BM_OracleSolve(benchmark::State& state) {
  fdfd::SceneOptions opt;
  opt.radial_cells = static_cast<int>(state.range(0));
  const auto grid = fdfd::build_scene(kSample1, kAir, 2500.0, 5.0, opt);
  const auto mat = fdfd::MaterialSpec::from_index_impedance(5.0, 15.0 * kAir.alpha() / kSample1.gap_area(),
                                                            kSample1.sample_area(), kAir);
  for (auto _ : state) benchmark::DoNotOptimize(fdfd::solve_harmonic(grid, kAir, mat, 1000.0));
  state.counters["unknowns"] = static_cast<double>(grid.unknowns());
}
BENCHMARK(BM_OracleSolve)->Arg(35)->Arg(70)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
