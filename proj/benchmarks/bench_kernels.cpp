// Copyright 2026 The declab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <memory>

#include <benchmark/benchmark.h>

#include "declab/decoupling.hpp"
#include "declab/diophantine.hpp"
#include "declab/energy.hpp"
#include "declab/exp_sums.hpp"
#include "declab/lattice_sets.hpp"
#include "declab/wavepackets.hpp"

using namespace declab;

namespace {

void BM_ParabolaMoment6(benchmark::State &state) {
  const auto N = state.range(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(expsum::parabola_moment6(-N, N));
  state.SetComplexityN(N);
}
BENCHMARK(BM_ParabolaMoment6)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond)->Complexity();

void BM_Moment6SweepAnnulus(benchmark::State &state) {
  const auto A = lattice::annulus_lattice(static_cast<double>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(energy::energy3(A));
  state.SetComplexityN(static_cast<std::int64_t>(A.size()));
  state.counters["points"] = static_cast<double>(A.size());
}
BENCHMARK(BM_Moment6SweepAnnulus)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond)->Complexity();

void BM_AdditiveEnergy2(benchmark::State &state) {
  const auto P = energy::random_paraboloid_sample(static_cast<std::size_t>(state.range(0)), 64, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(energy::additive_energy(P, 2));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AdditiveEnergy2)->RangeMultiplier(2)->Range(64, 2048)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

void BM_CountPerturbedLinear(benchmark::State &state) {
  const auto N = state.range(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(dioph::count_perturbed_linear(N, 3, Rational(1)));
  state.SetComplexityN(N);
}
BENCHMARK(BM_CountPerturbedLinear)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNCubed);

void BM_TorusMeanPower(benchmark::State &state) {
  const auto N = state.range(0);
  const auto f = expsum::TrigPoly::unit(lattice::paraboloid_lattice(2, N));
  for (auto _ : state)
    benchmark::DoNotOptimize(expsum::torus_mean_power(f, 4.0));
}
BENCHMARK(BM_TorusMeanPower)->RangeMultiplier(2)->Range(4, 32)->Unit(benchmark::kMillisecond);

void BM_ConeUnitRatio(benchmark::State &state) {
  const auto K = state.range(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(decouple::cone_unit_ratio(6.0, Rational(1, K * K)));
}
BENCHMARK(BM_ConeUnitRatio)->RangeMultiplier(2)->Range(8, 32)->Unit(benchmark::kMillisecond);

void BM_WavePacketDecompose(benchmark::State &state) {
  const auto N = state.range(0);
  auto design = std::make_shared<packets::PacketDesign>(N, 4);
  const auto f = packets::random_adelta_field(N, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(packets::wave_packet_decompose(f, design));
}
BENCHMARK(BM_WavePacketDecompose)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
