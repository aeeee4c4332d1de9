#include <random>

#include <benchmark/benchmark.h>

#include "minmax_match/classify.hpp"
#include "minmax_match/dataset.hpp"
#include "minmax_match/local_stats.hpp"
#include "minmax_match/pipeline.hpp"

namespace {

using namespace minmax_match;

GrayImage noise_image(std::size_t side) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  std::vector<double> px(side * side);
  for (double& p : px) p = u(rng);
  return GrayImage(side, side, std::move(px));
}

void BM_LocalMoments(benchmark::State& state, StatsBackend backend) {
  const GrayImage img = noise_image(static_cast<std::size_t>(state.range(0)));
  const WindowSpec w = WindowSpec::of(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(local_moments(img, w, backend));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}
BENCHMARK_CAPTURE(BM_LocalMoments, naive, StatsBackend::Naive)
    ->Args({128, 3})->Args({128, 11})->Args({128, 21});
BENCHMARK_CAPTURE(BM_LocalMoments, integral, StatsBackend::IntegralImage)
    ->Args({128, 3})->Args({128, 11})->Args({128, 21});

// Full JAFFE-sized frame: crop to 114x101, normalize, feature map.
void BM_Preprocess256(benchmark::State& state) {
  const GrayImage img = noise_image(256);
  PipelineConfig cfg;
  cfg.backend = state.range(0) == 0 ? StatsBackend::Naive : StatsBackend::IntegralImage;
  for (auto _ : state) benchmark::DoNotOptimize(preprocess(img, cfg));
}
BENCHMARK(BM_Preprocess256)->Arg(0)->Arg(1);

Gallery random_gallery(std::size_t rows, std::size_t len, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Gallery g(len);
  for (std::size_t t = 0; t < rows; ++t) {
    std::vector<double> v(len);
    for (double& x : v) x = u(rng);
    g.add(FeatureVector(1, len, std::move(v)), jaffe_class(static_cast<int>(t % 7)), {});
  }
  return g;
}

// One JAFFE-sized query (11514 features) against ~143 training rows.
void BM_ClassifyMinMax(benchmark::State& state) {
  std::mt19937_64 rng(8);
  const Gallery g = random_gallery(143, 11514, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(11514);
  for (double& x : v) x = u(rng);
  const FeatureVector test(1, v.size(), v);
  const double alpha = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(classify_minmax(g, test, alpha));
}
BENCHMARK(BM_ClassifyMinMax)->Arg(1)->Arg(3);

void BM_ClassifyNearest(benchmark::State& state) {
  std::mt19937_64 rng(9);
  const Gallery g = random_gallery(143, 11514, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(11514);
  for (double& x : v) x = u(rng);
  const FeatureVector test(1, v.size(), v);
  for (auto _ : state) benchmark::DoNotOptimize(classify_nn_euclidean(g, test));
}
BENCHMARK(BM_ClassifyNearest);

}  // namespace

BENCHMARK_MAIN();
