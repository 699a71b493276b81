// OpenMP kernels vs. the serial reference, at critic-sized shapes.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ruleclip/nn/kernels.hpp"

namespace {

using ruleclip::nn::Matrix;
namespace k = ruleclip::nn::kernels;

struct Shapes {
  std::vector<double> w, b, dw, db;
  Matrix x, z, dz, dx;
  std::size_t in, out;

  Shapes(std::size_t in_, std::size_t out_, std::size_t batch) : in(in_), out(out_) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    w.resize(in * out);
    b.resize(out);
    dw.resize(in * out);
    db.resize(out);
    for (auto& v : w) v = u(rng);
    for (auto& v : b) v = u(rng);
    x.resize(in, batch);
    dz.resize(out, batch);
    for (auto& v : x.values()) v = u(rng);
    for (auto& v : dz.values()) v = u(rng);
  }
};

template <bool Parallel>
void BM_forward(benchmark::State& state) {
  Shapes s(state.range(0), state.range(0), state.range(1));
  for (auto _ : state) {
    if constexpr (Parallel)
      k::affine_forward(s.w, s.b, s.x, s.z);
    else
      k::reference::affine_forward(s.w, s.b, s.x, s.z);
    benchmark::DoNotOptimize(s.z.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * state.range(1));
}

template <bool Parallel>
void BM_backward_params(benchmark::State& state) {
  Shapes s(state.range(0), state.range(0), state.range(1));
  for (auto _ : state) {
    if constexpr (Parallel)
      k::affine_backward_params(s.dz, s.x, s.dw, s.db);
    else
      k::reference::affine_backward_params(s.dz, s.x, s.dw, s.db);
    benchmark::DoNotOptimize(s.dw.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * state.range(1));
}

template <bool Parallel>
void BM_backward_input(benchmark::State& state) {
  Shapes s(state.range(0), state.range(0), state.range(1));
  for (auto _ : state) {
    if constexpr (Parallel)
      k::affine_backward_input(s.w, s.in, s.dz, s.dx);
    else
      k::reference::affine_backward_input(s.w, s.in, s.dz, s.dx);
    benchmark::DoNotOptimize(s.dx.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * state.range(1));
}

void shapes(benchmark::internal::Benchmark* b) {
  for (long width : {16, 64, 256})
    for (long batch : {1, 256}) b->Args({width, batch});
}

}  // namespace

BENCHMARK(BM_forward<true>)->Name("forward/openmp")->Apply(shapes);
BENCHMARK(BM_forward<false>)->Name("forward/reference")->Apply(shapes);
BENCHMARK(BM_backward_params<true>)->Name("backward_params/openmp")->Apply(shapes);
BENCHMARK(BM_backward_params<false>)->Name("backward_params/reference")->Apply(shapes);
BENCHMARK(BM_backward_input<true>)->Name("backward_input/openmp")->Apply(shapes);
BENCHMARK(BM_backward_input<false>)->Name("backward_input/reference")->Apply(shapes);

BENCHMARK_MAIN();
