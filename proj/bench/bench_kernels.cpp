#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ixa/agent.hpp"
#include "ixa/kernels.hpp"
#include "ixa/tokenizer.hpp"

namespace {

using ixa::kernels::Shape;

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

// Shapes of the default network: flattened 32x32 embedding into 128 hidden
// units, then 128 into 3 heads of 7 options.
Shape shape_from(const benchmark::State& state) {
  return {static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)),
          static_cast<std::size_t>(state.range(2))};
}

void shapes(benchmark::internal::Benchmark* b) {
  b->Args({32, 1024, 128})->Args({256, 1024, 128})->Args({32, 128, 21})->Args({256, 128, 21});
}

template <bool Parallel>
void BM_AffineForward(benchmark::State& state) {
  const Shape s = shape_from(state);
  const auto x = random_vector(s.rows * s.in, 1);
  const auto w = random_vector(s.in * s.out, 2);
  const auto b = random_vector(s.out, 3);
  std::vector<double> y(s.rows * s.out);
  for (auto _ : state) {
    if constexpr (Parallel) {
      ixa::kernels::parallel::affine_forward(x, w, b, y, s);
    } else {
      ixa::kernels::serial::affine_forward(x, w, b, y, s);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.rows * s.in * s.out));
}

template <bool Parallel>
void BM_WeightGrad(benchmark::State& state) {
  const Shape s = shape_from(state);
  const auto x = random_vector(s.rows * s.in, 1);
  const auto dy = random_vector(s.rows * s.out, 2);
  std::vector<double> dw(s.in * s.out);
  for (auto _ : state) {
    if constexpr (Parallel) {
      ixa::kernels::parallel::weight_grad(x, dy, dw, s);
    } else {
      ixa::kernels::serial::weight_grad(x, dy, dw, s);
    }
    benchmark::DoNotOptimize(dw.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.rows * s.in * s.out));
}

template <bool Parallel>
void BM_InputGrad(benchmark::State& state) {
  const Shape s = shape_from(state);
  const auto dy = random_vector(s.rows * s.out, 1);
  const auto w = random_vector(s.in * s.out, 2);
  std::vector<double> dx(s.rows * s.in);
  for (auto _ : state) {
    if constexpr (Parallel) {
      ixa::kernels::parallel::input_grad(dy, w, dx, s);
    } else {
      ixa::kernels::serial::input_grad(dy, w, dx, s);
    }
    benchmark::DoNotOptimize(dx.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.rows * s.in * s.out));
}

BENCHMARK_TEMPLATE(BM_AffineForward, false)->Name("affine_forward/serial")->Apply(shapes);
BENCHMARK_TEMPLATE(BM_AffineForward, true)->Name("affine_forward/parallel")->Apply(shapes);
BENCHMARK_TEMPLATE(BM_WeightGrad, false)->Name("weight_grad/serial")->Apply(shapes);
BENCHMARK_TEMPLATE(BM_WeightGrad, true)->Name("weight_grad/parallel")->Apply(shapes);
BENCHMARK_TEMPLATE(BM_InputGrad, false)->Name("input_grad/serial")->Apply(shapes);
BENCHMARK_TEMPLATE(BM_InputGrad, true)->Name("input_grad/parallel")->Apply(shapes);

// One DQfD gradient step on a batch of random token states.
void BM_TrainingUpdate(benchmark::State& state) {
  ixa::kernels::set_backend(state.range(0) ? ixa::kernels::Backend::Parallel
                                           : ixa::kernels::Backend::Serial);
  ixa::AgentConfig cfg;
  cfg.network.vocab_size = 33;
  ixa::Agent agent(cfg);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<ixa::TokenId> token(0, 32);
  std::uniform_int_distribution<int> option(0, 6);
  std::vector<ixa::Transition> batch(cfg.batch_size);
  for (auto& t : batch) {
    t.state.ids.resize(cfg.network.input_length);
    t.next_state.ids.resize(cfg.network.input_length);
    for (auto& id : t.state.ids) id = token(rng);
    for (auto& id : t.next_state.ids) id = token(rng);
    t.action.heads = {option(rng), option(rng), option(rng)};
    t.reward = -0.5;
    t.is_demo = true;
  }
  for (auto _ : state) benchmark::DoNotOptimize(agent.update_on_batch(batch));
  ixa::kernels::set_backend(ixa::kernels::Backend::Parallel);
}
BENCHMARK(BM_TrainingUpdate)->ArgName("parallel")->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
