// Parallel kernels against their serial references, plus raw sampler cost.
//   levylab_bench --benchmark_filter=Besov

#include <benchmark/benchmark.h>

#include <omp.h>

#include "levylab/besov.hpp"
#include "levylab/field.hpp"
#include "levylab/levy.hpp"
#include "levylab/regularity.hpp"

using namespace levylab;

namespace {

const LevyTriplet& jumpy() {
  static const LevyTriplet tr{0.1, 0.5, LevyMeasure::atoms({{1.0, 1.0}, {-0.5, 2.0}})};
  return tr;
}

Kernel kernel_of(const benchmark::State& st) { return st.range(0) == 0 ? Kernel::parallel : Kernel::reference; }
const char* kernel_label(const benchmark::State& st) { return st.range(0) == 0 ? "parallel" : "reference"; }

void BM_SampleWhiteNoise(benchmark::State& st) {
  const auto g = GridSpec::cube(2, 1.0, static_cast<std::uint32_t>(st.range(1)));
  std::uint32_t rep = 0;
  for (auto _ : st) {
    auto s = st.range(0) == 0 ? sample_white_noise(jumpy(), g, 1, rep++) : sample_white_noise_serial(jumpy(), g, 1, rep++);
    benchmark::DoNotOptimize(s.cells.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.total_cells()));
  st.SetLabel(st.range(0) == 0 ? "parallel" : "serial");
}
BENCHMARK(BM_SampleWhiteNoise)->ArgsProduct({{0, 1}, {8, 10}})->Unit(benchmark::kMillisecond);

void BM_BesovIso(benchmark::State& st) {
  const auto g = GridSpec::cube(2, 1.0, static_cast<std::uint32_t>(st.range(2)));
  const auto f = sample_white_noise(LevyTriplet::gaussian(1.0), g, 2).density();
  const auto lat = Lattice::from_grid(g);
  const auto spec = NormSpec::isotropic(-1.25, static_cast<double>(st.range(1)), 2.0);
  for (auto _ : st) benchmark::DoNotOptimize(besov_norm(f, lat, spec, {}, kernel_of(st)));
  st.SetLabel(kernel_label(st));
}
BENCHMARK(BM_BesovIso)->ArgsProduct({{0, 1}, {2, 3}, {7, 9}})->Unit(benchmark::kMillisecond);

void BM_BesovMixed(benchmark::State& st) {
  const auto g = GridSpec::cube(2, 1.0, static_cast<std::uint32_t>(st.range(1)));
  const auto f = sample_white_noise(LevyTriplet::gaussian(1.0), g, 3).density();
  const auto lat = Lattice::from_grid(g);
  const auto spec = NormSpec::mixed({-0.6, -0.6}, {1, 1}, 2.0);
  for (auto _ : st) benchmark::DoNotOptimize(besov_norm(f, lat, spec, {}, kernel_of(st)));
  st.SetLabel(kernel_label(st));
}
BENCHMARK(BM_BesovMixed)->ArgsProduct({{0, 1}, {7, 9}})->Unit(benchmark::kMillisecond);

void BM_TimeValuedNorm(benchmark::State& st) {
  const auto g = GridSpec::cube(2, 1.0, static_cast<std::uint32_t>(st.range(1)));
  const auto path = slab_path(sample_white_noise(LevyTriplet::gaussian(1.0), g, 4));
  const TimeNormSpec outer{0.5, 2.0, 2.0};
  const auto inner = NormSpec::isotropic(-1.0, 2.0, 2.0);
  for (auto _ : st) benchmark::DoNotOptimize(besov_norm_time_valued(path, outer, inner, {}, kernel_of(st)));
  st.SetLabel(kernel_label(st));
}
BENCHMARK(BM_TimeValuedNorm)->ArgsProduct({{0, 1}, {6, 8}})->Unit(benchmark::kMillisecond);

void BM_IncrementSampler(benchmark::State& st) {
  static const std::vector<LevyTriplet> triplets = {
      LevyTriplet::gaussian(1.0),
      jumpy(),
      {0.0, 0.0, LevyMeasure::alpha_stable(1.5, 1.0)},
      {0.0, 0.0, LevyMeasure::density(power_law_density(1.0, 1.2, 3.0))},
  };
  static const char* names[] = {"gaussian", "two-atom", "stable(1.5)", "power density"};
  const IncrementSampler sampler(triplets[static_cast<std::size_t>(st.range(0))], 1.0 / 1024);
  std::uint32_t i = 0;
  for (auto _ : st) {
    CounterRng rng(StreamId{5, StreamPurpose::generic, 0, 0, i++});
    benchmark::DoNotOptimize(sampler(rng));
  }
  st.SetLabel(names[st.range(0)]);
}
BENCHMARK(BM_IncrementSampler)->DenseRange(0, 3);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  benchmark::AddCustomContext("omp_max_threads", std::to_string(omp_get_max_threads()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
