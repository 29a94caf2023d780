// OpenMP kernels against the serial reference at the sizes the proposed
// model actually runs.

#include <benchmark/benchmark.h>

#include <vector>

#include "eegnet/dataset.hpp"
#include "eegnet/kernels.hpp"
#include "eegnet/model.hpp"
#include "eegnet/rng.hpp"

using namespace eegnet;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    return v;
}

// Second conv of the widest block: 64 channels over 23 samples.
const ConvGeometry kWide{64, 64, 23, 3, 1, 1};
// The stem: 1 -> 16 channels, K7, stride 2 over the raw segment.
const ConvGeometry kStem{1, 16, 178, 7, 2, 3};

const ConvGeometry& geometry(const benchmark::State& state) { return state.range(0) == 0 ? kStem : kWide; }

template <auto Fn>
void conv_forward(benchmark::State& state) {
    const ConvGeometry& g = geometry(state);
    const auto x = noise(g.input_size(), 1), w = noise(g.weight_size(), 2), b = noise(g.out_channels, 3);
    std::vector<double> y(g.output_size());
    for (auto _ : state) {
        Fn(g, x, w, b, y);
        benchmark::DoNotOptimize(y.data());
    }
}

template <auto Fn>
void conv_backward_input(benchmark::State& state) {
    const ConvGeometry& g = geometry(state);
    const auto dy = noise(g.output_size(), 1), w = noise(g.weight_size(), 2);
    std::vector<double> dx(g.input_size());
    for (auto _ : state) {
        Fn(g, dy, w, dx);
        benchmark::DoNotOptimize(dx.data());
    }
}

template <auto Fn>
void conv_backward_params(benchmark::State& state) {
    const ConvGeometry& g = geometry(state);
    const auto x = noise(g.input_size(), 1), dy = noise(g.output_size(), 2);
    std::vector<double> dw(g.weight_size()), db(g.out_channels);
    for (auto _ : state) {
        Fn(g, x, dy, dw, db);
        benchmark::DoNotOptimize(dw.data());
    }
}

template <auto Fn>
void matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = noise(n * n, 1), b = noise(n * n, 2);
    std::vector<double> c(n * n);
    for (auto _ : state) {
        Fn(n, n, n, a, b, c);
        benchmark::DoNotOptimize(c.data());
    }
}

void model_forward_batch(benchmark::State& state) {
    const Model m = build_proposed_model(5, kSegmentLength, 1);
    const auto rows = static_cast<std::size_t>(state.range(0));
    const Tensor x({rows, kSegmentLength}, noise(rows * kSegmentLength, 4));
    for (auto _ : state) benchmark::DoNotOptimize(forward_batch(m, x));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}

}  // namespace

BENCHMARK(conv_forward<kernels::reference::conv1d_forward>)->Name("conv_forward/reference")->Arg(0)->Arg(1);
BENCHMARK(conv_forward<kernels::conv1d_forward>)->Name("conv_forward/openmp")->Arg(0)->Arg(1);
BENCHMARK(conv_backward_input<kernels::reference::conv1d_backward_input>)->Name("conv_backward_input/reference")->Arg(0)->Arg(1);
BENCHMARK(conv_backward_input<kernels::conv1d_backward_input>)->Name("conv_backward_input/openmp")->Arg(0)->Arg(1);
BENCHMARK(conv_backward_params<kernels::reference::conv1d_backward_params>)->Name("conv_backward_params/reference")->Arg(0)->Arg(1);
BENCHMARK(conv_backward_params<kernels::conv1d_backward_params>)->Name("conv_backward_params/openmp")->Arg(0)->Arg(1);
BENCHMARK(matmul<kernels::reference::matmul>)->Name("matmul/reference")->Arg(64)->Arg(256);
BENCHMARK(matmul<kernels::matmul>)->Name("matmul/openmp")->Arg(64)->Arg(256);
BENCHMARK(model_forward_batch)->Arg(1)->Arg(64);

BENCHMARK_MAIN();
