// Copyright 2026 The rydpump Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rydpump/chain.hpp"
#include "rydpump/evolution.hpp"
#include "rydpump/readout.hpp"
#include "rydpump/rfwave.hpp"
#include "rydpump/tridiagonal.hpp"
#include "rydpump/units.hpp"

namespace {

using namespace rydpump;

HamiltonianMatrix bench_hamiltonian(std::size_t n) {
  return build_hamiltonian(ChainSpec::dimerized(n),
                           {units::from_mhz(0.9), units::from_mhz(0.6), units::from_mhz(3.0)});
}

void BM_EigenDecompose(benchmark::State& state) {
  const HamiltonianMatrix h = bench_hamiltonian(static_cast<std::size_t>(state.range(0)));
  TridiagonalEigen out;
  for (auto _ : state) {
    eigen_decompose_unsorted(h, out);
    benchmark::DoNotOptimize(out.values.data());
  }
}
BENCHMARK(BM_EigenDecompose)->Arg(5)->Arg(15)->Arg(30)->Arg(60);

void BM_PropagatorStep(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const HamiltonianMatrix h = bench_hamiltonian(n);
  std::vector<Complex> psi(n, Complex(0.0, 0.0));
  psi[0] = 1.0;
  Propagator prop;
  for (auto _ : state) {
    prop.apply(h, 1e-3, psi);
    benchmark::DoNotOptimize(psi.data());
  }
}
BENCHMARK(BM_PropagatorStep)->Arg(5)->Arg(30);

void BM_EvolveTwoCycles(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const ChainSpec chain = ChainSpec::dimerized(n);
  PumpProtocol p;
  p.j_max = units::from_mhz(1.5);
  p.delta0 = units::from_mhz(7.0);
  p.period = 1.25;
  p.n_cycles = 2;
  const QuantumState psi0 = QuantumState::localized(n, 0);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_final(chain, p, psi0));
}
BENCHMARK(BM_EvolveTwoCycles)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_Nnls(benchmark::State& state) {
  const BasisSet basis = default_basis();
  const std::vector<double> weights{0.1, 0.2, 0.3, 0.15, 0.15, 0.1};
  const TofTrace trace = synthesize_trace(weights, basis, default_noise_amplitude(basis), 7);
  for (auto _ : state) benchmark::DoNotOptimize(decompose_trace(trace, basis, true));
}
BENCHMARK(BM_Nnls)->Unit(benchmark::kMicrosecond);

void BM_SynthesizeWaveform(benchmark::State& state) {
  std::vector<ToneSchedule> tones;
  int site = 1;
  for (double f : {24047.3, 24271.1, 22691.5}) {
    ToneSchedule tone;
    tone.site_i = site;
    tone.site_j = ++site;
    tone.carrier_mhz = f;
    tone.rabi = constant_envelope(units::from_mhz(2.0));
    tone.detuning = constant_envelope(0.0);
    tones.push_back(tone);
  }
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_waveform(tones, 2.0, 50000.0));
}
BENCHMARK(BM_SynthesizeWaveform)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
