#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "arcoord/occlusion.hpp"
#include "arcoord/planefit.hpp"
#include "arcoord/polygon.hpp"
#include "arcoord/protocol.hpp"

namespace {

using namespace arcoord;

std::vector<Point3> table_points(std::size_t inliers, std::size_t outliers) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::normal_distribution<double> noise(0.0, 0.002);
  std::vector<Point3> pts;
  for (std::size_t i = 0; i < inliers; ++i) pts.emplace_back(u(rng), noise(rng), u(rng));
  for (std::size_t i = 0; i < outliers; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  return pts;
}

void BM_RansacPlane(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pts = table_points(n * 3 / 4, n / 4);
  RansacConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(ransac_plane(pts, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_RansacPlane)->Arg(400)->Arg(4000);

Polygon2 regular(int k, double radius, double phase) {
  std::vector<Vec2> v;
  for (int i = 0; i < k; ++i) {
    const double a = phase + 2.0 * M_PI * i / k;
    v.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  return convex_hull(v);
}

void BM_IntersectConvex(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto a = regular(k, 1.0, 0.0);
  const auto b = regular(k, 1.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(intersect_convex(a, b));
}
BENCHMARK(BM_IntersectConvex)->Arg(4)->Arg(12)->Arg(64);

void BM_EncodePoseUpdate(benchmark::State& state) {
  const protocol::WireMessage m = protocol::PoseUpdate{1, 42, protocol::to_wire(RigidTransform::rot_y(0.3))};
  for (auto _ : state) benchmark::DoNotOptimize(protocol::encode(m));
}
BENCHMARK(BM_EncodePoseUpdate);

void BM_DecodePoseUpdate(benchmark::State& state) {
  const auto bytes = protocol::encode(protocol::PoseUpdate{1, 42, protocol::to_wire(RigidTransform::rot_y(0.3))});
  for (auto _ : state) benchmark::DoNotOptimize(protocol::decode(bytes));
}
BENCHMARK(BM_DecodePoseUpdate);

void BM_OcclusionMask(benchmark::State& state) {
  const auto w = static_cast<std::uint32_t>(state.range(0));
  const std::uint32_t h = w * 3 / 4;
  DepthMap real(w, h, 0.001), virt(w, h, 0.001);
  std::mt19937 rng(3);
  for (auto& x : real.values) x = static_cast<std::uint16_t>(rng());
  for (auto& x : virt.values) x = static_cast<std::uint16_t>(rng());
  for (auto _ : state) benchmark::DoNotOptimize(occlusion_mask(real, virt));
  state.SetItemsProcessed(state.iterations() * w * h);
}
BENCHMARK(BM_OcclusionMask)->Arg(256)->Arg(640);

}  // namespace
BENCHMARK_MAIN();
