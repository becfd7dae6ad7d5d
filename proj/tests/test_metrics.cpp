#include "wirefit/metrics.hpp"

#include "wirefit/synthgen.hpp"
#include "wirefit/types.hpp"
#include "wirefit/wireframe.hpp"

#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

using wirefit::Vec3;
using wirefit::Wireframe;

namespace {

double directed_mean(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double sum = 0.0;
  for (const Vec3& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : b) best = std::min(best, (p - q).norm());
    sum += best;
  }
  return sum / static_cast<double>(a.size());
}

double directed_sup(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double worst = 0.0;
  for (const Vec3& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : b) best = std::min(best, (p - q).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

double brute_chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  return 0.5 * (directed_mean(a, b) + directed_mean(b, a));
}

double brute_hausdorff(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  return std::max(directed_sup(a, b), directed_sup(b, a));
}

std::vector<Vec3> random_points(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) pts.emplace_back(coord(rng), coord(rng), coord(rng));
  return pts;
}

Wireframe segment_wireframe(const Vec3& a, const Vec3& b) {
  wirefit::BSplineCurve c;
  c.degree = 1;
  c.closed = false;
  const double len = (b - a).norm();
  c.knots = {0.0, 0.0, len, len};
  c.control_points = {a, b};
  Wireframe wf;
  wf.corners = {a, b};
  wf.curves = {c};
  return wf;
}

}  // namespace

TEST_CASE("hand-checked distances on tiny point sets") {
  const std::vector<Vec3> a = {Vec3(0, 0, 0), Vec3(2, 0, 0)};
  const std::vector<Vec3> b = {Vec3(0, 0, 0)};
  // Directed means: (0 + 2)/2 = 1 and 0; chamfer halves the sum.
  CHECK(wirefit::chamfer_distance(a, b) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(wirefit::hausdorff_distance(a, b) == doctest::Approx(2.0).epsilon(1e-15));

  const std::vector<Vec3> c = {Vec3(0, 0, 0)};
  const std::vector<Vec3> d = {Vec3(1, 0, 0)};
  CHECK(wirefit::chamfer_distance(c, d) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(wirefit::hausdorff_distance(c, d) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("metrics match the quadratic reference on 100 random pairs") {
  std::mt19937 rng(1234);
  std::uniform_int_distribution<int> size_dist(1, 500);
  for (int trial = 0; trial < 100; ++trial) {
    CAPTURE(trial);
    const auto a = random_points(size_dist(rng), rng);
    const auto b = random_points(size_dist(rng), rng);

    const double cd = wirefit::chamfer_distance(a, b);
    const double hd = wirefit::hausdorff_distance(a, b);
    CHECK(std::abs(cd - brute_chamfer(a, b)) <= 1e-12);
    CHECK(std::abs(hd - brute_hausdorff(a, b)) <= 1e-12);
    CHECK(cd <= hd + 1e-15);  // the mean never exceeds the supremum
  }
}

TEST_CASE("identical sets measure zero and order does not matter") {
  std::mt19937 rng(99);
  const auto a = random_points(300, rng);
  CHECK(wirefit::chamfer_distance(a, a) == 0.0);
  CHECK(wirefit::hausdorff_distance(a, a) == 0.0);

  const auto b = random_points(200, rng);
  CHECK(std::abs(wirefit::chamfer_distance(a, b) - wirefit::chamfer_distance(b, a)) <=
        1e-12);
  CHECK(std::abs(wirefit::hausdorff_distance(a, b) -
                 wirefit::hausdorff_distance(b, a)) <= 1e-12);
}

TEST_CASE("distances are invariant under rigid motion") {
  std::mt19937 rng(7);
  const auto a = random_points(150, rng);
  const auto b = random_points(170, rng);

  const Eigen::AngleAxisd rot(0.83, Vec3(1, 2, -0.5).normalized());
  const Vec3 shift(10.0, -3.0, 4.5);
  std::vector<Vec3> ra, rb;
  for (const Vec3& p : a) ra.push_back(rot * p + shift);
  for (const Vec3& p : b) rb.push_back(rot * p + shift);

  CHECK(std::abs(wirefit::chamfer_distance(a, b) - wirefit::chamfer_distance(ra, rb)) <=
        1e-9);
  CHECK(std::abs(wirefit::hausdorff_distance(a, b) -
                 wirefit::hausdorff_distance(ra, rb)) <= 1e-9);
}

TEST_CASE("wireframe sampling walks every curve at the requested spacing") {
  SUBCASE("unit segment at spacing 0.25 gives the 5 grid points") {
    const Wireframe wf = segment_wireframe(Vec3(0, 0, 0), Vec3(1, 0, 0));
    const auto samples = wirefit::sample_wireframe(wf, 0.25);
    REQUIRE(samples.size() == 5);
    for (int i = 0; i < 5; ++i) {
      CHECK((samples[i] - Vec3(0.25 * i, 0, 0)).norm() <= 1e-12);
    }
  }
  SUBCASE("curves concatenate in order") {
    Wireframe wf = segment_wireframe(Vec3(0, 0, 0), Vec3(1, 0, 0));
    const Wireframe second = segment_wireframe(Vec3(0, 5, 0), Vec3(1, 5, 0));
    wf.curves.push_back(second.curves[0]);
    const auto samples = wirefit::sample_wireframe(wf, 0.5);
    REQUIRE(samples.size() == 6);
    CHECK(samples[0].y() == 0.0);
    CHECK(samples[5].y() == 5.0);
  }
  SUBCASE("consecutive samples stay within sane spacing bounds") {
    const Wireframe wf = segment_wireframe(Vec3(0, 0, 0), Vec3(2, 1, 2));  // length 3
    const double spacing = 0.4;
    const auto samples = wirefit::sample_wireframe(wf, spacing);
    REQUIRE(samples.size() >= 2);
    for (std::size_t i = 1; i < samples.size(); ++i) {
      const double gap = (samples[i] - samples[i - 1]).norm();
      CHECK(gap >= 0.5 * spacing);
      CHECK(gap <= 1.5 * spacing);
    }
  }
}

TEST_CASE("evaluating a wireframe against itself reports zero error") {
  const wirefit::SyntheticShape cube = wirefit::make_shape("cube");
  const Wireframe truth = cube.truth_wireframe();
  const auto report = wirefit::evaluate_wireframes(truth, truth, 0.01);
  CHECK_FALSE(report.failed);
  CHECK(report.chamfer == 0.0);
  CHECK(report.hausdorff == 0.0);
  CHECK(report.sample_spacing == 0.01);
  CHECK(report.pred_samples == report.truth_samples);
  CHECK(report.pred_curves == 12);
  CHECK(report.truth_curves == 12);
  CHECK(report.pred_corners == 8);
  CHECK(report.truth_corners == 8);
}

TEST_CASE("an empty prediction fails the report instead of throwing") {
  const Wireframe truth = segment_wireframe(Vec3(0, 0, 0), Vec3(1, 0, 0));
  const Wireframe empty;
  const auto report = wirefit::evaluate_wireframes(empty, truth, 0.1);
  CHECK(report.failed);
  CHECK(std::isnan(report.chamfer));
  CHECK(std::isnan(report.hausdorff));
  CHECK(report.pred_curves == 0);
  CHECK(report.truth_curves == 1);
}

TEST_CASE("evaluate_wireframes rejects unusable arguments") {
  const Wireframe truth = segment_wireframe(Vec3(0, 0, 0), Vec3(1, 0, 0));
  const Wireframe empty;
  CHECK_THROWS_AS(wirefit::evaluate_wireframes(truth, empty, 0.1),
                  wirefit::ValidationError);
  CHECK_THROWS_AS(wirefit::evaluate_wireframes(truth, truth, 0.0),
                  wirefit::ValidationError);
  CHECK_THROWS_AS(wirefit::evaluate_wireframes(truth, truth, -1.0),
                  wirefit::ValidationError);
}

TEST_CASE("report JSON spells NaN distances as null") {
  const Wireframe truth = segment_wireframe(Vec3(0, 0, 0), Vec3(1, 0, 0));
  SUBCASE("failed report") {
    const auto report = wirefit::evaluate_wireframes(Wireframe{}, truth, 0.1);
    const std::string json = wirefit::report_to_json(report);
    CHECK(json.find("\"chamfer\": null") != std::string::npos);
    CHECK(json.find("\"hausdorff\": null") != std::string::npos);
    CHECK(json.find("\"failed\": true") != std::string::npos);
    CHECK(json.find("nan") == std::string::npos);
  }
  SUBCASE("successful report") {
    const auto report = wirefit::evaluate_wireframes(truth, truth, 0.1);
    const std::string json = wirefit::report_to_json(report);
    CHECK(json.find("null") == std::string::npos);
    CHECK(json.find("\"failed\": false") != std::string::npos);
    CHECK(json.find("\"chamfer\": 0") != std::string::npos);
  }
}
