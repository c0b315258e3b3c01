#include <map>
#include <string>

#include <benchmark/benchmark.h>

#include "mmc/geometry.hpp"
#include "mmc/io.hpp"
#include "mmc/kernels.hpp"

namespace {

const mmc::CloneStructure& fixture(const char* name) {
  static std::map<std::string, mmc::CloneStructure> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    it = cache.emplace(name, mmc::io::read_structure(std::string(MMC_DATA_DIR) + "/" + name + ".json")).first;
  }
  return it->second;
}

void BM_SampleSerial(benchmark::State& st) {
  const auto& s = fixture("planar_multi");
  for (auto _ : st) benchmark::DoNotOptimize(mmc::kernels::sample_serial(s, static_cast<int>(st.range(0)),
                                                                         mmc::kernels::SampleMode::Anchor));
}
void BM_SampleParallel(benchmark::State& st) {
  const auto& s = fixture("planar_multi");
  for (auto _ : st) benchmark::DoNotOptimize(mmc::kernels::sample_parallel(s, static_cast<int>(st.range(0)),
                                                                           mmc::kernels::SampleMode::Anchor));
}
BENCHMARK(BM_SampleSerial)->Arg(6)->Arg(9);
BENCHMARK(BM_SampleParallel)->Arg(6)->Arg(9);

void BM_SeparationBrute(benchmark::State& st) {
  const auto& s = fixture("middle_third");
  const auto cloud = mmc::kernels::sample_serial(s, static_cast<int>(st.range(0)), mmc::kernels::SampleMode::Anchor);
  for (auto _ : st) benchmark::DoNotOptimize(mmc::kernels::separation_brute_force(s, cloud, 6));
}
void BM_SeparationTree(benchmark::State& st) {
  const auto& s = fixture("middle_third");
  const auto cloud = mmc::kernels::sample_serial(s, static_cast<int>(st.range(0)), mmc::kernels::SampleMode::Anchor);
  for (auto _ : st) benchmark::DoNotOptimize(mmc::kernels::separation_tree(s, cloud, 6));
}
BENCHMARK(BM_SeparationBrute)->Arg(8)->Arg(10);
BENCHMARK(BM_SeparationTree)->Arg(8)->Arg(10);

void BM_LevelSumsSerial(benchmark::State& st) {
  const auto& s = fixture("figure_matrix");
  const auto coll = mmc::model_collection(s);
  for (auto _ : st) benchmark::DoNotOptimize(mmc::kernels::level_quantities_serial(s, coll, 0.6, 12));
}
void BM_LevelSumsParallel(benchmark::State& st) {
  const auto& s = fixture("figure_matrix");
  const auto coll = mmc::model_collection(s);
  for (auto _ : st) benchmark::DoNotOptimize(mmc::kernels::level_quantities_parallel(s, coll, 0.6, 12));
}
BENCHMARK(BM_LevelSumsSerial);
BENCHMARK(BM_LevelSumsParallel);

void BM_BoxCounts(benchmark::State& st, bool parallel) {
  const auto& s = fixture("middle_third");
  const auto cloud = mmc::sample_points(s, 14);
  const auto scales = mmc::default_box_scales(cloud);
  for (auto _ : st) {
    benchmark::DoNotOptimize(parallel ? mmc::kernels::box_counts_parallel(cloud.points, scales)
                                      : mmc::kernels::box_counts_serial(cloud.points, scales));
  }
}
BENCHMARK_CAPTURE(BM_BoxCounts, serial, false);
BENCHMARK_CAPTURE(BM_BoxCounts, parallel, true);

}  // namespace

BENCHMARK_MAIN();
