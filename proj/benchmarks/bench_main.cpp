#include "crab/action.hpp"
#include "crab/cutoff.hpp"
#include "crab/discriminant.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace crab;

namespace {

IsotopySpec wave() {
  SinusoidalParams p;
  p.base = std::sqrt(2.0);
  p.amplitude = 0.1;
  p.kx = 1.0;
  p.kt = 1.0;
  return sinusoidal_hamiltonian(p);
}

void BM_CircleFlow(benchmark::State& state) {
  const ModelPtr model = make_circle();
  const IsotopySpec spec = wave();
  const Vec x = Vec::Constant(1, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(flow(*model, spec, x, static_cast<double>(state.range(0))));
}
BENCHMARK(BM_CircleFlow)->Arg(1)->Arg(8);

void BM_TorusFlow(benchmark::State& state) {
  const ModelPtr model = make_flat_torus(2);
  KineticEnergyParams kp;
  kp.weights = {2.0, 3.0};
  kp.modulation = 0.1;
  const IsotopySpec spec = kinetic_energy_hamiltonian(2, kp);
  const Vec x = model->sample(4).front();
  for (auto _ : state) benchmark::DoNotOptimize(flow(*model, spec, x, 4.0));
}
BENCHMARK(BM_TorusFlow);

void BM_Gradient(benchmark::State& state) {
  const ModelPtr model = make_circle();
  const IsotopySpec spec = wave();
  const CutoffProfile prof = make_profile(admissible_constants(*model, spec, 0.0, 3.0));
  const RabinowitzFunctional A(*model, spec, prof);
  const Loop loop = loop_from_discriminant(A, Vec::Constant(1, 0.1), 0.7, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(A.gradient(loop));
}
BENCHMARK(BM_Gradient)->Arg(64)->Arg(256)->Arg(1024);

void BM_CircleDiscriminant(benchmark::State& state) {
  const ModelPtr model = make_circle();
  const IsotopySpec spec = constant_hamiltonian(std::sqrt(2.0));
  for (auto _ : state) benchmark::DoNotOptimize(find_discriminant(*model, spec, 0.0, 5.0));
}
BENCHMARK(BM_CircleDiscriminant)->Unit(benchmark::kMillisecond);

void BM_TorusChords(benchmark::State& state) {
  const ModelPtr model = make_flat_torus(2);
  const IsotopySpec spec = constant_hamiltonian(1.0);
  const Vec q0 = Vec::Zero(2);
  const Vec q1 = (Vec(2) << 0.5, 0.0).finished();
  for (auto _ : state) benchmark::DoNotOptimize(find_chords(*model, spec, q0, q1, 0.0, 3.0));
}
BENCHMARK(BM_TorusChords)->Unit(benchmark::kMillisecond);

}  // namespace
