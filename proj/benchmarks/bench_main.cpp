#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hashq/accel_sim.hpp"
#include "hashq/ddpg.hpp"
#include "hashq/image.hpp"
#include "hashq/ngp.hpp"
#include "hashq/quantizer.hpp"

namespace {

using namespace hashq;

void BM_FakeQuantize(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = n(rng);
  const auto p = make_weight_params(symmetric_hull(calibrate_range(x, 0.999)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(fake_quantize(p, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FakeQuantize)->Arg(4096)->Arg(65536);

void BM_GemmCycles(benchmark::State& state) {
  std::uint64_t m = 1;
  for (auto _ : state) benchmark::DoNotOptimize(gemm_cycles(1024 + (m++ & 7), 64, 64, 6, 4, 16));
}
BENCHMARK(BM_GemmCycles);

void BM_SimulateAcceptanceTrace(benchmark::State& state) {
  const auto model = ToyNgpModel::initialize(NgpConfig{}, 1);
  const auto trace = export_trace(model, 128, 128);
  const auto policy = QuantPolicy::uniform(12, 3, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(trace, policy, HwConfig{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace.accesses.size()));
}
BENCHMARK(BM_SimulateAcceptanceTrace)->Arg(8)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_NgpForward(benchmark::State& state) {
  const auto model = ToyNgpModel::initialize(NgpConfig{}, 1);
  const Vec2 x{0.37, 0.61};
  for (auto _ : state) benchmark::DoNotOptimize(forward(x, model));
}
BENCHMARK(BM_NgpForward);

void BM_NgpRender(benchmark::State& state) {
  const auto model = ToyNgpModel::initialize(NgpConfig{}, 1);
  const auto policy = QuantPolicy::uniform(12, 3, 6);
  for (auto _ : state) benchmark::DoNotOptimize(render(model, policy, 64, 64));
}
BENCHMARK(BM_NgpRender)->Unit(benchmark::kMillisecond);

void BM_NgpTrainStep(benchmark::State& state) {
  const auto image = make_checkerboard(128, 128, 8, 0.1f, 0.9f);
  TrainOptions o;
  o.log_every = 0;
  for (auto _ : state) benchmark::DoNotOptimize(train(image, NgpConfig{}, 10, 1, o));
}
BENCHMARK(BM_NgpTrainStep)->Unit(benchmark::kMillisecond);

void BM_DdpgUpdate(benchmark::State& state) {
  DdpgAgent agent(DdpgConfig{});
  std::vector<Transition> batch(18);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& t : batch) {
    for (auto& v : t.obs.normalized) v = u(rng);
    t.next_obs = t.obs;
    t.action = u(rng);
    t.reward = u(rng);
  }
  batch.back().done = true;
  for (auto _ : state) benchmark::DoNotOptimize(agent.update(batch));
}
BENCHMARK(BM_DdpgUpdate);

}  // namespace

BENCHMARK_MAIN();
