// Serial reference vs OpenMP kernels: many independent streams and the two
// offline passes, plus the per-sample cost of the real-time filter.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "vqf/offline.hpp"
#include "vqf/streams.hpp"
#include "vqf/vqf.hpp"

namespace {

struct Recording {
  std::vector<vqf::Vec3> gyr, acc, mag;
};

Recording make_recording(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Recording r;
  r.gyr.resize(n);
  r.acc.resize(n);
  r.mag.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = k * 0.01;
    r.gyr[k] = {0.5 * std::sin(0.3 * t) + 0.002 * noise(rng), 0.4 * std::cos(0.2 * t), 0.01 + 0.002 * noise(rng)};
    r.acc[k] = {0.3 * std::sin(t) + 0.03 * noise(rng), 0.2, 9.81 + 0.03 * noise(rng)};
    r.mag[k] = {10.0 * std::sin(0.1 * t), 18.0, -46.0 + 0.3 * noise(rng)};
  }
  return r;
}

std::vector<Recording> make_recordings(int count, std::size_t n) {
  std::vector<Recording> out;
  for (int i = 0; i < count; ++i) out.push_back(make_recording(n, 100 + i));
  return out;
}

std::vector<vqf::StreamInput> inputs(const std::vector<Recording>& recs) {
  std::vector<vqf::StreamInput> out;
  for (const auto& r : recs) out.push_back({0.01, r.gyr, r.acc, r.mag});
  return out;
}

void BM_Update(benchmark::State& state) {
  const auto rec = make_recording(100000, 1);
  vqf::Vqf filter(0.01);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(filter.update(rec.gyr[k], rec.acc[k], rec.mag[k]));
    k = (k + 1) % rec.gyr.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Update);

void BM_StreamsSerial(benchmark::State& state) {
  const auto recs = make_recordings(static_cast<int>(state.range(0)), 20000);
  const auto in = inputs(recs);
  for (auto _ : state) benchmark::DoNotOptimize(vqf::process_streams_serial(in));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 20000);
}
BENCHMARK(BM_StreamsSerial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_StreamsParallel(benchmark::State& state) {
  const auto recs = make_recordings(static_cast<int>(state.range(0)), 20000);
  const auto in = inputs(recs);
  for (auto _ : state) benchmark::DoNotOptimize(vqf::process_streams(in));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 20000);
}
BENCHMARK(BM_StreamsParallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Offline(benchmark::State& state) {
  const auto rec = make_recording(60000, 2);
  const auto exec = state.range(0) ? vqf::Execution::parallel : vqf::Execution::serial;
  for (auto _ : state) benchmark::DoNotOptimize(vqf::offline_vqf(rec.gyr, rec.acc, rec.mag, 0.01, {}, exec));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_Offline)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
