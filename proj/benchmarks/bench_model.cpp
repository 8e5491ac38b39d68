#include <benchmark/benchmark.h>

#include "parkcast/rng.hpp"
#include "parkcast/transformer.hpp"

using namespace parkcast;

namespace {

WindowSample sample_for(const ModelConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  WindowSample s;
  s.window = static_cast<std::size_t>(cfg.window);
  s.channels = static_cast<std::size_t>(cfg.input_channels);
  s.input.resize(s.window * s.channels);
  for (auto& v : s.input) v = rng.uniform(0.0, 1.0);
  s.input_timestamps.resize(s.window);
  for (std::size_t i = 0; i < s.window; ++i)
    s.input_timestamps[i] = 1630454400 + static_cast<Timestamp>(i) * 600;
  s.target.resize(cfg.horizon);
  for (auto& v : s.target) v = rng.uniform(0.0, 1.0);
  return s;
}

ModelConfig bench_config(std::int64_t window) {
  ModelConfig cfg;
  cfg.input_channels = 9;
  cfg.window = window;
  cfg.horizon = 144;
  cfg.d_model = 32;
  cfg.n_heads = 4;
  cfg.n_layers = 2;
  cfg.d_ff = 64;
  cfg.seed = 1;
  return cfg;
}

void BM_forward(benchmark::State& state) {
  ModelConfig cfg = bench_config(state.range(0));
  TrainedModel model = init_model(cfg);
  WindowSample s = sample_for(cfg, 7);
  for (auto _ : state) {
    auto out = predict(model, s);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_forward)->Arg(144)->Arg(432);

void BM_forward_backward(benchmark::State& state) {
  ModelConfig cfg = bench_config(state.range(0));
  TrainedModel model = init_model(cfg);
  WindowSample s = sample_for(cfg, 7);
  Tensor target = Tensor::from_values({1, cfg.horizon}, s.target);
  for (auto _ : state) {
    Tensor loss = mse_loss(model_forward(model, s), target);
    loss.backward();
    benchmark::DoNotOptimize(loss.item());
    for (auto& [name, p] : model.params) p.zero_grad();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_forward_backward)->Arg(144)->Arg(432);

void BM_attention(benchmark::State& state) {
  const std::int64_t L = state.range(0), dk = 16;
  Rng rng(3);
  Tensor q = Tensor::zeros({L, dk});
  Tensor k = Tensor::zeros({L, dk});
  Tensor v = Tensor::zeros({L, dk});
  for (auto& x : q.values()) x = rng.uniform(-1, 1);
  for (auto& x : k.values()) x = rng.uniform(-1, 1);
  for (auto& x : v.values()) x = rng.uniform(-1, 1);
  for (auto _ : state) {
    Tensor out = scaled_dot_attention(q, k, v);
    benchmark::DoNotOptimize(out.values().data());
  }
}
BENCHMARK(BM_attention)->Arg(144)->Arg(432);

}  // namespace
