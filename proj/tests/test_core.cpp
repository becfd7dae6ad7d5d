#include "wirefit/kdtree.hpp"
#include "wirefit/point_cloud.hpp"
#include "wirefit/sampling.hpp"
#include "wirefit/types.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <vector>

using wirefit::KdTree;
using wirefit::PointCloudField;
using wirefit::Vec3;

namespace {

std::vector<Vec3> random_cloud(int n, std::uint32_t seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-scale, scale);
  std::vector<Vec3> pts(n);
  for (Vec3& p : pts) p = Vec3(uni(rng), uni(rng), uni(rng));
  return pts;
}

// O(N) reference for radius_query.
std::vector<int> brute_radius(const std::vector<Vec3>& pts, const Vec3& c, double r) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    if ((pts[i] - c).norm() <= r) out.push_back(i);
  }
  return out;
}

// Greedy farthest-point reference: seed 0, ties to lowest index.
std::vector<int> brute_fps(const std::vector<Vec3>& pts, int count) {
  std::vector<int> picked = {0};
  std::vector<double> best(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) best[i] = (pts[i] - pts[0]).norm();
  while (static_cast<int>(picked.size()) < count) {
    int arg = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (best[i] > best[arg]) arg = static_cast<int>(i);
    }
    picked.push_back(arg);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      best[i] = std::min(best[i], (pts[i] - pts[arg]).norm());
    }
  }
  return picked;
}

}  // namespace

TEST_CASE("farthest_point_sampling takes the far end of a collinear run") {
  const std::vector<Vec3> pts = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0),
                                 Vec3(3, 0, 0)};
  const std::vector<int> picked = wirefit::farthest_point_sampling(pts, 2);
  CHECK(picked == std::vector<int>{0, 3});
}

TEST_CASE("farthest_point_sampling breaks square ties toward the lower index") {
  // Seed 0 -> far corner (1,1); the remaining two corners tie at distance 1.
  const std::vector<Vec3> pts = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0),
                                 Vec3(0, 1, 0)};
  const std::vector<int> picked = wirefit::farthest_point_sampling(pts, 3);
  CHECK(picked == std::vector<int>{0, 2, 1});
}

TEST_CASE("farthest_point_sampling with count == n covers every index") {
  const std::vector<Vec3> pts = random_cloud(40, 7);
  std::vector<int> picked = wirefit::farthest_point_sampling(pts, 40);
  CHECK(picked.size() == 40);
  std::sort(picked.begin(), picked.end());
  for (int i = 0; i < 40; ++i) CHECK(picked[i] == i);
}

TEST_CASE("farthest_point_sampling matches the greedy reference") {
  const std::vector<Vec3> pts = random_cloud(120, 21);
  for (int count : {1, 2, 13, 60, 120}) {
    CAPTURE(count);
    CHECK(wirefit::farthest_point_sampling(pts, count) == brute_fps(pts, count));
  }
}

TEST_CASE("farthest_point_sampling is deterministic and validates count") {
  const std::vector<Vec3> pts = random_cloud(50, 3);
  CHECK(wirefit::farthest_point_sampling(pts, 17) ==
        wirefit::farthest_point_sampling(pts, 17));
  CHECK_THROWS_AS(wirefit::farthest_point_sampling(pts, 0), wirefit::ValidationError);
  CHECK_THROWS_AS(wirefit::farthest_point_sampling(pts, 51), wirefit::ValidationError);
}

TEST_CASE("radius_query equals a brute-force scan on random clouds") {
  const std::vector<Vec3> pts = random_cloud(300, 99);
  const KdTree tree(pts);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(-1.2, 1.2);
  std::uniform_real_distribution<double> rad(0.01, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 c(uni(rng), uni(rng), uni(rng));
    const double r = rad(rng);
    const std::vector<int> got = tree.radius_query(c, r);
    CHECK(got == brute_radius(pts, c, r));
    CHECK(std::is_sorted(got.begin(), got.end()));
  }
}

TEST_CASE("radius_query boundary is inclusive") {
  const std::vector<Vec3> pts = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0),
                                 Vec3(3, 0, 0), Vec3(4, 0, 0)};
  const KdTree tree(pts);
  // Unit-spaced line, center x=2, radius 1 -> x in {1, 2, 3}.
  CHECK(tree.radius_query(Vec3(2, 0, 0), 1.0) == std::vector<int>{1, 2, 3});
  // Radius below every gap -> only the coincident point.
  CHECK(tree.radius_query(Vec3(2, 0, 0), 0.5) == std::vector<int>{2});
  // Radius covering the diameter -> everything.
  CHECK(tree.radius_query(Vec3(2, 0, 0), 10.0) == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("kd-tree nearest matches brute force with lowest-index ties") {
  const std::vector<Vec3> pts = random_cloud(150, 17);
  const KdTree tree(pts);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> uni(-1.2, 1.2);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 c(uni(rng), uni(rng), uni(rng));
    const auto [idx, dist] = tree.nearest(c);
    int best = 0;
    for (int i = 1; i < static_cast<int>(pts.size()); ++i) {
      if ((pts[i] - c).norm() < (pts[best] - c).norm()) best = i;
    }
    CHECK(idx == best);
    CHECK(dist == doctest::Approx((pts[best] - c).norm()).epsilon(1e-12));
  }

  // Exact duplicate points: the lower index wins.
  const std::vector<Vec3> dup = {Vec3(5, 5, 5), Vec3(1, 1, 1), Vec3(1, 1, 1)};
  CHECK(KdTree(dup).nearest(Vec3(1, 1, 1)).first == 1);
}

TEST_CASE("kd-tree nearest can exclude one index") {
  const std::vector<Vec3> pts = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(5, 0, 0)};
  const KdTree tree(pts);
  CHECK(tree.nearest(Vec3(0, 0, 0)).first == 0);
  CHECK(tree.nearest(Vec3(0, 0, 0), 0).first == 1);
}

TEST_CASE("estimate_sampling_distance is the mean nearest-neighbor gap") {
  const std::vector<Vec3> line = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0),
                                  Vec3(3, 0, 0)};
  CHECK(wirefit::estimate_sampling_distance(line) == doctest::Approx(1.0));
}

TEST_CASE("XYZD parse reads positions and distances directly") {
  std::istringstream in("0 0 0 0.0\n1 0 0 1.0\n2 0 0 0.25\n3 0 0 0.5\n");
  const PointCloudField cloud = wirefit::read_point_cloud(in, "test");
  REQUIRE(cloud.size() == 4);
  CHECK(cloud.points[0] == Vec3(0, 0, 0));
  CHECK(cloud.points[1] == Vec3(1, 0, 0));
  CHECK(cloud.distances[0] == 0.0);
  CHECK(cloud.distances[1] == 1.0);
  // No header: r falls back to the mean nearest-neighbor estimate.
  CHECK(cloud.sampling_distance_r == doctest::Approx(1.0));
}

TEST_CASE("XYZD honors the r header") {
  std::istringstream in("# r=0.0325\n0 0 0 0\n1 0 0 0\n2 0 0 0\n3 0 0 0\n");
  CHECK(wirefit::read_point_cloud(in).sampling_distance_r == doctest::Approx(0.0325));
}

TEST_CASE("XYZD rejects bad input with line numbers") {
  SUBCASE("distance above 1") {
    std::istringstream in("0 0 0 1.5\n1 0 0 0\n2 0 0 0\n3 0 0 0\n");
    CHECK_THROWS_AS(wirefit::read_point_cloud(in), wirefit::ValidationError);
  }
  SUBCASE("malformed token") {
    std::istringstream in("0 0 0 0\n1 zap 0 0\n2 0 0 0\n3 0 0 0\n");
    try {
      wirefit::read_point_cloud(in);
      FAIL("expected ParseError");
    } catch (const wirefit::ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("wrong field count") {
    std::istringstream in("0 0 0 0\n1 0 0\n2 0 0 0\n3 0 0 0\n");
    CHECK_THROWS_AS(wirefit::read_point_cloud(in), wirefit::ParseError);
  }
  SUBCASE("too few points") {
    std::istringstream in("0 0 0 0.0\n1 0 0 1.0\n");
    CHECK_THROWS_AS(wirefit::read_point_cloud(in), wirefit::ValidationError);
  }
}

TEST_CASE("XYZD round-trip is bit-exact at 9 significant digits") {
  PointCloudField cloud;
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < 64; ++i) {
    // Values quantized to 9 significant digits survive the text format.
    auto q = [&](double v) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.9g", v);
      return std::strtod(buf, nullptr);
    };
    cloud.points.push_back(Vec3(q(uni(rng)), q(uni(rng)), q(uni(rng))));
    cloud.distances.push_back(q(uni(rng)));
  }
  cloud.sampling_distance_r = 0.02;

  std::ostringstream out;
  wirefit::write_point_cloud(cloud, out);
  std::istringstream in(out.str());
  const PointCloudField back = wirefit::read_point_cloud(in);
  REQUIRE(back.size() == cloud.size());
  CHECK(back.sampling_distance_r == cloud.sampling_distance_r);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(back.points[i] == cloud.points[i]);
    CHECK(back.distances[i] == cloud.distances[i]);
  }
}

TEST_CASE("extract_skeleton selects exactly the under-threshold points") {
  PointCloudField cloud;
  cloud.points = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)};
  cloud.distances = {0.0, 0.02, 0.5, 0.01};
  cloud.sampling_distance_r = 1.0;

  const wirefit::SharpSkeleton skel = wirefit::extract_skeleton(cloud, 0.03);
  CHECK(skel.parent_indices == std::vector<int>{0, 1, 3});
  CHECK(skel.positions[2] == Vec3(3, 0, 0));
  CHECK(skel.distances[1] == 0.02);
}

TEST_CASE("extract_skeleton reports a shape-level fail when nothing is sharp") {
  PointCloudField cloud;
  cloud.points = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)};
  cloud.distances = {1.0, 1.0, 1.0, 1.0};
  cloud.sampling_distance_r = 1.0;
  try {
    wirefit::extract_skeleton(cloud, 0.03);
    FAIL("expected PipelineError");
  } catch (const wirefit::PipelineError& e) {
    CHECK(e.fail() == wirefit::PipelineError::Fail::no_sharp_features);
  }
}

TEST_CASE("PointCloudField validation enforces the field invariants") {
  PointCloudField cloud;
  cloud.points = {Vec3(0, 0, 0)};
  cloud.distances = {0.0, 0.1};
  cloud.sampling_distance_r = 1.0;
  CHECK_THROWS_AS(cloud.validate(), wirefit::ValidationError);

  cloud.distances = {-0.1};
  CHECK_THROWS_AS(cloud.validate(), wirefit::ValidationError);

  cloud.distances = {0.1};
  cloud.sampling_distance_r = 0.0;
  CHECK_THROWS_AS(cloud.validate(), wirefit::ValidationError);

  cloud.sampling_distance_r = 1.0;
  CHECK_NOTHROW(cloud.validate());
}
