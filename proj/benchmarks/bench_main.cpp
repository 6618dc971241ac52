#include <benchmark/benchmark.h>

#include "pqs/fock_optics.hpp"
#include "pqs/spin_lattice.hpp"
#include "pqs/tomography.hpp"
#include "pqs/valence_bond.hpp"

using namespace pqs;

static void BM_ApplyTdcTwoSinglets(benchmark::State& state) {
  const auto in = SourceConfig::two_singlets().state();
  TdcSetting s;
  s.reflectivity = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(apply_tdc(in, "1", "3", s));
}
BENCHMARK(BM_ApplyTdcTwoSinglets);

static void BM_PostselectedState(benchmark::State& state) {
  const auto src = SourceConfig::two_singlets();
  const std::string pattern[] = {"1", "2", "3", "4"};
  TdcSetting s;
  s.reflectivity = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_postselected_state(src, s, {"1", "3"}, pattern));
}
BENCHMARK(BM_PostselectedState);

static void BM_SectorSpectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<Bond> bonds;
  for (int i = 0; i < n; ++i) bonds.push_back({i, (i + 1) % n, 1.0, "J1"});
  const SpinSystem ring(n, bonds);
  for (auto _ : state) benchmark::DoNotOptimize(sz_sector_spectrum(ring, 0.0, 6));
}
BENCHMARK(BM_SectorSpectrum)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_CheckerboardCoefficients(benchmark::State& state) {
  const auto geo = checkerboard_geometry();
  const auto basis = checkerboard_basis(geo);
  for (auto _ : state) benchmark::DoNotOptimize(checkerboard_coefficients(geo, basis, 2.0));
}
BENCHMARK(BM_CheckerboardCoefficients);

static void BM_EnumerateCoverings(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_coverings(n));
}
BENCHMARK(BM_EnumerateCoverings)->Arg(6)->Arg(8)->Arg(10)->Arg(12);

static void BM_Reconstruct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CVector psi = CVector::Zero(1 << n);
  psi(0) = psi((1 << n) - 1) = 1 / std::sqrt(2.0);
  const auto counts = simulate_counts(DensityMatrix::from_pure(psi), build_settings(n), 10'000, 1);
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(counts));
}
BENCHMARK(BM_Reconstruct)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
