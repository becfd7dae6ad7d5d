#include "wirefit/kdtree.hpp"
#include "wirefit/metrics.hpp"
#include "wirefit/pipeline.hpp"
#include "wirefit/synthgen.hpp"

#include <benchmark/benchmark.h>

namespace {

const wirefit::PointCloudField& cube_cloud() {
  static const wirefit::PointCloudField cloud =
      wirefit::sample_field(wirefit::make_shape("cube"), 0.02, 0.0, 1);
  return cloud;
}

void bm_kdtree_radius_query(benchmark::State& state) {
  const auto& cloud = cube_cloud();
  const wirefit::KdTree tree(cloud.points);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree.radius_query(cloud.points[i], 0.08));
    i = (i + 97) % cloud.points.size();
  }
}
BENCHMARK(bm_kdtree_radius_query);

void bm_chamfer(benchmark::State& state) {
  const auto& shape = wirefit::make_shape("cube");
  const auto samples = wirefit::sample_wireframe(shape.truth_wireframe(), 0.01);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wirefit::chamfer_distance(samples, samples));
  }
}
BENCHMARK(bm_chamfer);

void bm_cube_pipeline(benchmark::State& state) {
  const auto& cloud = cube_cloud();
  for (auto _ : state) {
    benchmark::DoNotOptimize(wirefit::extract_wireframe(cloud));
  }
}
BENCHMARK(bm_cube_pipeline)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
