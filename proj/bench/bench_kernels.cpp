// Parallel kernels against their serial references.

#include "qes/classify.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace qes;

namespace {

FamilyInstance sol2_instance() {
  std::mt19937_64 rng(5);
  return sample_instance(Variant::P1y_Sol2, 3, rng);
}

void matrix_parallel(benchmark::State& state) {
  const FamilyInstance inst = sol2_instance();
  const DiffOp h = hamiltonian(inst);
  const MonomialSpace space = space_of(inst, static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(matrix_of(h, space));
  state.counters["dim"] = static_cast<double>(space.dim());
}

void matrix_serial(benchmark::State& state) {
  const FamilyInstance inst = sol2_instance();
  const DiffOp h = hamiltonian(inst);
  const MonomialSpace space = space_of(inst, static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(matrix_of_serial(h, space));
  state.counters["dim"] = static_cast<double>(space.dim());
}

std::vector<FamilyInstance> sweep_batch() {
  std::mt19937_64 rng(9);
  std::vector<FamilyInstance> insts;
  for (Variant v : h2_variants())
    for (unsigned i = 0; i < 4; ++i) insts.push_back(sample_instance(v, 1 + i % 3, rng));
  return insts;
}

void sweep_parallel(benchmark::State& state) {
  const auto insts = sweep_batch();
  for (auto _ : state) benchmark::DoNotOptimize(sweep_identities(insts, 3));
}

void sweep_serial(benchmark::State& state) {
  const auto insts = sweep_batch();
  for (auto _ : state) benchmark::DoNotOptimize(sweep_identities_serial(insts, 3));
}

DomainSpec quadrant() {
  DomainSpec d;
  d.kind = DomainKind::Quadrant;
  d.curves = {{MultiPoly(), Side::Above}};
  d.y_min = Rational(0);
  return d;
}

Prefactor hex_prefactor() {
  FamilyInstance inst;
  inst.variant = Variant::HexExample;
  inst.c = 2;
  inst.j = 1;
  inst.jt = 1;
  return prefactor_of(inst);
}

void quadrature_parallel(benchmark::State& state) {
  const Prefactor pre = hex_prefactor();
  const DomainSpec d = quadrant();
  const MultiPoly pol = generic_pol(4);
  for (auto _ : state) benchmark::DoNotOptimize(quadrature_crosscheck(pre, d, pol));
}

void quadrature_serial(benchmark::State& state) {
  const Prefactor pre = hex_prefactor();
  const DomainSpec d = quadrant();
  const MultiPoly pol = generic_pol(4);
  for (auto _ : state) benchmark::DoNotOptimize(quadrature_crosscheck_serial(pre, d, pol));
}

}  // namespace

BENCHMARK(matrix_serial)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(matrix_parallel)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(sweep_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(sweep_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(quadrature_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(quadrature_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
