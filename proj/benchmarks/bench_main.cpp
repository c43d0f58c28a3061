#include <benchmark/benchmark.h>

#include "tclpop/density.hpp"
#include "tclpop/pde.hpp"
#include "tclpop/population.hpp"
#include "tclpop/rng.hpp"

namespace {

void BM_PhiloxBlock(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tclpop::random_block(1, tclpop::StreamTag::kStep, i++, 7));
}
BENCHMARK(BM_PhiloxBlock);

void BM_PopulationStep(benchmark::State& state) {
  tclpop::PopulationConfig cfg;
  cfg.n_units = static_cast<std::size_t>(state.range(0));
  auto pop = tclpop::sample_population(cfg);
  tclpop::init_states(pop, 20.0, 0.5, 0.4);
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(pop.step(1.0, 30.0, 0.1, threads));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PopulationStep)->Args({1000, 1})->Args({100000, 1})->Args({100000, 4});

void BM_BoundaryDensities(benchmark::State& state) {
  tclpop::PopulationConfig cfg;
  cfg.n_units = 100000;
  auto pop = tclpop::sample_population(cfg);
  tclpop::init_states(pop, 20.0, 0.5, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(tclpop::estimate_boundary_densities(pop, 0.004));
}
BENCHMARK(BM_BoundaryDensities);

void BM_PdeStep(benchmark::State& state) {
  tclpop::pde::PdeConfig cfg;
  cfg.cells = static_cast<std::size_t>(state.range(0));
  auto f = tclpop::pde::PdfFields::uniform_deadband(cfg, 20.0, 0.6, 0.4);
  const auto drift = tclpop::pde::DriftFields::from(cfg, 30.0);
  const double dt = 0.5 * tclpop::pde::max_stable_dt(f, drift, 0.0);
  for (auto _ : state) {
    f = tclpop::pde::step(f, drift, tclpop::pde::CouplingLaw{}, 0.0, dt);
    benchmark::DoNotOptimize(f.f0b.mass.data());
  }
}
BENCHMARK(BM_PdeStep)->Arg(200)->Arg(800);

}  // namespace

BENCHMARK_MAIN();
