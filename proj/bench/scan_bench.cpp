// Energy scans of det(H - E): serial reference against the OpenMP kernel.

#include <benchmark/benchmark.h>

#include <vector>

#include "ptsym/determinant.hpp"

namespace {

struct Fixture {
  ptsym::TridiagonalOperator op;
  std::vector<double> energies;
};

Fixture make(std::size_t n, std::size_t points) {
  Fixture f{ptsym::build_hamiltonian({3.0, 0.0}, ptsym::GridSpec{8.0, n, 0.0}), {}};
  for (std::size_t k = 0; k < points; ++k) f.energies.push_back(-5.0 + 0.05 * static_cast<double>(k));
  return f;
}

template <auto Kernel>
void scan(benchmark::State& state) {
  const auto f = make(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f.op, f.energies));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (long n : {1000L, 4000L, 16000L}) b->Args({n, 500});
}

}  // namespace

BENCHMARK(scan<ptsym::kernels::det_scan_serial>)->Name("det_scan_serial")->Apply(sizes)->UseRealTime();
BENCHMARK(scan<ptsym::kernels::det_scan_parallel>)->Name("det_scan_parallel")->Apply(sizes)->UseRealTime();

BENCHMARK_MAIN();
