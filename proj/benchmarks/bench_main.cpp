#include <benchmark/benchmark.h>

#include <map>
#include <numbers>

#include "gapsol/bands.hpp"
#include "gapsol/correlations.hpp"
#include "gapsol/dynamics.hpp"
#include "gapsol/linearized.hpp"
#include "gapsol/spectral.hpp"
#include "gapsol/squeezing.hpp"
#include "gapsol/stationary.hpp"

using namespace gapsol;

namespace {
constexpr double kPi = std::numbers::pi;

const BandEdgeData& edge() {
  static const BandEdgeData e = band_edge_data(Model{}, 1, Edge::low);
  return e;
}

const StationaryState& soliton(std::size_t n) {
  static std::map<std::size_t, StationaryState> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    auto g = make_grid(32 * kPi, n);
    it = cache.emplace(n, newton_solve(envelope_seed(2.5, edge(), g), 2.5, Model{})).first;
  }
  return it->second;
}
}  // namespace

static void BM_SecondDerivative(benchmark::State& st) {
  auto g = make_grid(32 * kPi, static_cast<std::size_t>(st.range(0)));
  auto f = ComplexField::from_function(g, [](double x) { return cplx(std::exp(-x * x / 8)); });
  for (auto _ : st) benchmark::DoNotOptimize(second_derivative(f));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_SecondDerivative)->RangeMultiplier(2)->Range(256, 8192)->Complexity();

static void BM_BandStructure(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(band_structure(Model{}, 201, 4, 32, 1));
}
BENCHMARK(BM_BandStructure)->Unit(benchmark::kMillisecond);

static void BM_NewtonSolve(benchmark::State& st) {
  auto g = make_grid(32 * kPi, static_cast<std::size_t>(st.range(0)));
  auto seed = envelope_seed(2.5, edge(), g);
  for (auto _ : st) benchmark::DoNotOptimize(newton_solve(seed, 2.5, Model{}));
}
BENCHMARK(BM_NewtonSolve)->Arg(512)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

static void BM_StrangStep(benchmark::State& st) {
  const auto& s = soliton(1024);
  StrangStepper stepper(s.grid(), s.model, 1e-3);
  auto psi = s.profile;
  for (auto _ : st) stepper.step(psi.values());
}
BENCHMARK(BM_StrangStep);

static void BM_BackpropagateStationary(benchmark::State& st) {
  const auto& s = soliton(1024);
  const double t = static_cast<double>(st.range(0));
  auto tr = stationary_trajectory(s, t, 1e-3);
  auto w = AdjointPair::hermitian(s.profile);
  for (auto _ : st) benchmark::DoNotOptimize(backpropagate(w, tr, t));
}
BENCHMARK(BM_BackpropagateStationary)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_OptimalSqueezing(benchmark::State& st) {
  const auto& s = soliton(1024);
  for (auto _ : st) benchmark::DoNotOptimize(optimal_squeezing(s, 4.0));
}
BENCHMARK(BM_OptimalSqueezing)->Unit(benchmark::kMillisecond);

static void BM_SlotCovariance(benchmark::State& st) {
  const auto& s = soliton(1024);
  auto tr = stationary_trajectory(s, 1.0, 1e-3);
  auto p = SlotPartition::position(s.profile.grid_ptr(), -10 * kPi, 10 * kPi,
                                   static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(slot_covariance(tr, 1.0, 0.0, p, 1));
}
BENCHMARK(BM_SlotCovariance)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_DensePropagatorExp(benchmark::State& st) {
  auto g = make_grid(8 * kPi, static_cast<std::size_t>(st.range(0)));
  auto s = newton_solve(envelope_seed(2.5, edge(), g), 2.5, Model{});
  auto tr = stationary_trajectory(s, 1.0, 1e-3);
  for (auto _ : st) benchmark::DoNotOptimize(dense_propagator(tr, 1.0, DenseBackend::exponential));
}
BENCHMARK(BM_DensePropagatorExp)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
