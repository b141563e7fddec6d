// Serial reference vs OpenMP kernels. Arg 0 = Serial, 1 = Parallel.

#include <benchmark/benchmark.h>

#include "patchwarp/fixtures.hpp"
#include "patchwarp/kernels.hpp"
#include "patchwarp/modulation.hpp"

using namespace patchwarp;
namespace fx = patchwarp::fixtures;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_Warp(benchmark::State& st) {
  const int size = static_cast<int>(st.range(1));
  const RasterImage src = fx::render_texture(fx::TextureKind::Checker, size, size, 0);
  const BinaryMask valid(size, size, 1);
  const Quad region = square_quad(size);
  const Quad dst{{Point2{size * 0.1, size * 0.05}, Point2{size * 0.95, size * 0.2}, Point2{size * 0.85, size * 0.9},
                  Point2{size * 0.05, size * 0.8}}};
  const Homography dst_to_src = estimate_homography(dst, region);
  const PixelRect roi{0, 0, size, size};
  for (auto _ : st) {
    auto out = kernels::warp_perspective(src, valid, dst_to_src, region, size, size, roi, exec_of(st));
    benchmark::DoNotOptimize(out.image.pixels().data());
  }
  st.SetItemsProcessed(st.iterations() * size * size);
}
BENCHMARK(BM_Warp)->ArgsProduct({{0, 1}, {256, 1024}})->Unit(benchmark::kMillisecond);

void BM_Conv(benchmark::State& st) {
  const int c = static_cast<int>(st.range(1));
  const FeatureMap in = fx::random_features(c, 64, 64, 1);
  const ConvParams p = random_conv_params(c, c, 3, 2);
  for (auto _ : st) {
    auto out = kernels::conv2d_same(in, p, exec_of(st));
    benchmark::DoNotOptimize(out.values().data());
  }
}
BENCHMARK(BM_Conv)->ArgsProduct({{0, 1}, {8, 32}})->Unit(benchmark::kMillisecond);

void BM_ChannelStats(benchmark::State& st) {
  const FeatureMap h = fx::random_features(static_cast<int>(st.range(1)), 128, 128, 3);
  for (auto _ : st) {
    auto s = kernels::channel_stats(h, exec_of(st));
    benchmark::DoNotOptimize(s.mean.data());
  }
}
BENCHMARK(BM_ChannelStats)->ArgsProduct({{0, 1}, {8, 64}})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
