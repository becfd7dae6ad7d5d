#include "wirefit/splinefit.hpp"

#include "wirefit/pipeline.hpp"
#include "wirefit/synthgen.hpp"
#include "wirefit/topograph.hpp"
#include "wirefit/types.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using wirefit::BSplineCurve;
using wirefit::CurvePath;
using wirefit::TopologicalGraph;
using wirefit::Vec3;

namespace {

constexpr double kPi = std::numbers::pi;

TopologicalGraph make_graph(std::vector<Vec3> nodes,
                            std::vector<std::array<int, 2>> edges) {
  TopologicalGraph g;
  g.nodes = std::move(nodes);
  g.edges = std::move(edges);
  g.node_corner_cluster.assign(g.nodes.size(), -1);
  return g;
}

// Each edge id must join consecutive node ids (wrapping when closed).
void check_path_consistency(const TopologicalGraph& g, const CurvePath& path) {
  REQUIRE(path.edge_ids.size() + (path.closed ? 0 : 1) == path.node_ids.size());
  for (std::size_t j = 0; j < path.edge_ids.size(); ++j) {
    const int a = path.node_ids[j];
    const int b = path.node_ids[(j + 1) % path.node_ids.size()];
    const auto& e = g.edges[path.edge_ids[j]];
    const bool forward = e[0] == a && e[1] == b;
    const bool backward = e[0] == b && e[1] == a;
    CHECK((forward || backward));
  }
}

// Direct evaluation of the control-point objective.
double objective_oracle(const BSplineCurve& c, const std::vector<Vec3>& pts,
                        const std::vector<double>& dist,
                        const std::vector<double>& params) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double r = (c.evaluate(params[i]) - pts[i]).norm() - dist[i];
    sum += r * r;
  }
  return sum;
}

double max_line_deviation(const BSplineCurve& c, const Vec3& a, const Vec3& b) {
  const Vec3 dir = (b - a).normalized();
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double u =
        c.domain_start() + (c.domain_end() - c.domain_start()) * i / 400.0;
    const Vec3 p = c.evaluate(u);
    const Vec3 off = (p - a) - (p - a).dot(dir) * dir;
    worst = std::max(worst, off.norm());
  }
  return worst;
}

}  // namespace

TEST_CASE("a pure cycle partitions into one closed path") {
  const TopologicalGraph g = make_graph(
      {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)},
      {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const auto paths = wirefit::partition_into_paths(g);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].closed);
  CHECK(paths[0].edge_ids.size() == 4);
  CHECK(paths[0].node_ids.size() == 4);
  CHECK(paths[0].node_ids.front() == 0);  // starts at the lowest node
  check_path_consistency(g, paths[0]);
}

TEST_CASE("a path graph partitions into one open corner-to-corner path") {
  const TopologicalGraph g = make_graph(
      {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)},
      {{0, 1}, {1, 2}, {2, 3}});
  const auto paths = wirefit::partition_into_paths(g);
  REQUIRE(paths.size() == 1);
  CHECK_FALSE(paths[0].closed);
  CHECK(paths[0].node_ids == std::vector<int>{0, 1, 2, 3});
  CHECK(paths[0].edge_ids == std::vector<int>{0, 1, 2});
  check_path_consistency(g, paths[0]);
}

TEST_CASE("a lollipop loop stays open and returns to its corner") {
  const TopologicalGraph g = make_graph(
      {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-2, 0, 0)},
      {{0, 1}, {1, 2}, {2, 0}, {0, 3}});
  const auto paths = wirefit::partition_into_paths(g);
  REQUIRE(paths.size() == 2);

  CHECK_FALSE(paths[0].closed);
  CHECK(paths[0].node_ids.front() == 0);
  CHECK(paths[0].node_ids.back() == 0);  // loop anchored at the corner
  CHECK(paths[0].edge_ids.size() == 3);

  CHECK(paths[1].node_ids == std::vector<int>{0, 3});
  for (const CurvePath& p : paths) check_path_consistency(g, p);
}

TEST_CASE("every cube graph edge lands in exactly one of 12 corner paths") {
  const wirefit::SyntheticShape cube = wirefit::make_shape("cube");
  const wirefit::PointCloudField cloud = wirefit::sample_field(cube, 0.02, 0.0, 7);
  const wirefit::PipelineResult result = wirefit::extract_wireframe(cloud);
  const TopologicalGraph& g = result.graph;

  const auto paths = wirefit::partition_into_paths(g);
  CHECK(paths.size() == 12);

  const auto degrees = g.node_degrees();
  std::vector<int> edge_uses(g.edges.size(), 0);
  for (const CurvePath& p : paths) {
    CHECK_FALSE(p.closed);
    CHECK(degrees[p.node_ids.front()] == 3);
    CHECK(degrees[p.node_ids.back()] == 3);
    for (std::size_t j = 1; j + 1 < p.node_ids.size(); ++j) {
      CHECK(degrees[p.node_ids[j]] == 2);
    }
    for (int e : p.edge_ids) ++edge_uses[e];
    check_path_consistency(g, p);
  }
  for (int uses : edge_uses) CHECK(uses == 1);
}

TEST_CASE("path parameterization accumulates segment lengths") {
  SUBCASE("nodes at arc lengths 0, 1, 2") {
    const TopologicalGraph g = make_graph(
        {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}, {{0, 1}, {1, 2}});
    CurvePath path;
    path.node_ids = {0, 1, 2};
    path.edge_ids = {0, 1};
    const auto breaks = wirefit::parameterize_path(g, path);
    REQUIRE(breaks.size() == 3);
    CHECK(breaks[0] == 0.0);
    CHECK(breaks[1] == doctest::Approx(1.0));
    CHECK(breaks[2] == doctest::Approx(2.0));
  }
  SUBCASE("closed triangle gains the wrapping break") {
    const TopologicalGraph g = make_graph(
        {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1}, {1, 2}, {2, 0}});
    CurvePath path;
    path.closed = true;
    path.node_ids = {0, 1, 2};
    path.edge_ids = {0, 1, 2};
    const auto breaks = wirefit::parameterize_path(g, path);
    REQUIRE(breaks.size() == 4);
    CHECK(breaks[3] == doctest::Approx(2.0 + std::sqrt(2.0)));  // perimeter
    CHECK(std::is_sorted(breaks.begin(), breaks.end()));
  }
}

TEST_CASE("collinear points fit to a curve on the same line") {
  const Vec3 a(0, 0, 0), b(2, 1, -1);
  std::vector<Vec3> pts;
  std::vector<double> params;
  for (int i = 0; i <= 30; ++i) {
    const double t = i / 30.0;
    pts.push_back(a + t * (b - a));
    params.push_back(t * (b - a).norm());
  }
  const std::vector<double> node_params = {0.0, 0.5 * (b - a).norm(), (b - a).norm()};
  const auto fit = wirefit::fit_spline(pts, params, node_params, a, b, false, 3);
  CHECK_FALSE(fit.degraded);
  fit.curve.validate();
  CHECK(max_line_deviation(fit.curve, a, b) <= 1e-9);
  CHECK((fit.curve.evaluate(fit.curve.domain_start()) - a).norm() == 0.0);
  CHECK((fit.curve.evaluate(fit.curve.domain_end()) - b).norm() == 0.0);
}

TEST_CASE("four points on a single cubic span interpolate exactly") {
  const Vec3 start(0, 0, 0), end(3, 0, 0);
  const std::vector<Vec3> pts = {start, Vec3(1, 2, 1), Vec3(2, -1, 0.5), end};
  const std::vector<double> params = {0.0, 1.0, 2.0, 3.0};
  const std::vector<double> node_params = {0.0, 3.0};
  const auto fit = wirefit::fit_spline(pts, params, node_params, start, end, false, 3);
  CHECK_FALSE(fit.degraded);
  CHECK(fit.curve.degree == 3);
  CHECK(fit.curve.control_points.size() == 4);  // square interior system
  for (int i = 0; i < 4; ++i) {
    CHECK((fit.curve.evaluate(params[i]) - pts[i]).norm() <= 1e-9);
  }
}

TEST_CASE("quarter-arc fit stays within 1e-3 of the unit circle") {
  const int n = 100;
  std::vector<Vec3> pts;
  std::vector<double> params;
  for (int i = 0; i < n; ++i) {
    const double theta = 0.5 * kPi * i / (n - 1);
    pts.push_back(Vec3(std::cos(theta), std::sin(theta), 0.0));
    params.push_back(theta);  // arc length on the unit circle
  }
  const std::vector<double> node_params = {0.0, kPi / 8, kPi / 4, 3 * kPi / 8, kPi / 2};
  const auto fit = wirefit::fit_spline(pts, params, node_params, pts.front(),
                                       pts.back(), false, 3);
  CHECK_FALSE(fit.degraded);
  double worst = 0.0;
  for (int i = 0; i <= 500; ++i) {
    const double u = 0.5 * kPi * i / 500.0;
    worst = std::max(worst, std::abs(fit.curve.evaluate(u).norm() - 1.0));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("scarce data degrades the fit but keeps collinear geometry exact") {
  const Vec3 a(0, 0, 0), b(1, 0, 0);
  const std::vector<double> node_params = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int count : {1, 2, 3}) {
    CAPTURE(count);
    std::vector<Vec3> pts;
    std::vector<double> params;
    for (int i = 0; i < count; ++i) {
      const double t = (i + 1.0) / (count + 1.0);
      pts.push_back(a + t * (b - a));
      params.push_back(t);
    }
    const auto fit = wirefit::fit_spline(pts, params, node_params, a, b, false, 3);
    CHECK(fit.degraded);
    fit.curve.validate();
    CHECK(max_line_deviation(fit.curve, a, b) <= 1e-9);
    CHECK((fit.curve.evaluate(fit.curve.domain_start()) - a).norm() <= 1e-12);
    CHECK((fit.curve.evaluate(fit.curve.domain_end()) - b).norm() <= 1e-12);
  }
}

TEST_CASE("degree-1 single-span request returns the straight segment") {
  const Vec3 a(0, 0, 0), b(1, 1, 0);
  const std::vector<Vec3> pts = {Vec3(0.5, 0.5, 0)};
  const std::vector<double> params = {0.5};
  const auto fit = wirefit::fit_spline(pts, params, std::vector<double>{0.0, 1.0},
                                       a, b, false, 1);
  CHECK_FALSE(fit.degraded);
  CHECK(fit.curve.degree == 1);
  CHECK(fit.curve.control_points.size() == 2);
  CHECK((fit.curve.control_points.front() - a).norm() == 0.0);
  CHECK((fit.curve.control_points.back() - b).norm() == 0.0);
}

TEST_CASE("fit_spline validates its inputs") {
  const std::vector<Vec3> pts = {Vec3(0, 0, 0)};
  const std::vector<double> params = {0.0};
  const std::vector<double> nodes = {0.0, 1.0};
  CHECK_THROWS_AS(wirefit::fit_spline(pts, std::vector<double>{}, nodes,
                                      Vec3(0, 0, 0), Vec3(1, 0, 0), false, 3),
                  wirefit::ValidationError);
  CHECK_THROWS_AS(wirefit::fit_spline(pts, params, std::vector<double>{0.0},
                                      Vec3(0, 0, 0), Vec3(1, 0, 0), false, 3),
                  wirefit::ValidationError);
  CHECK_THROWS_AS(wirefit::fit_spline(pts, params, nodes, Vec3(0, 0, 0),
                                      Vec3(1, 0, 0), false, 0),
                  wirefit::ValidationError);
  CHECK_THROWS_AS(wirefit::fit_spline(pts, params, std::vector<double>{1.0, 0.0},
                                      Vec3(0, 0, 0), Vec3(1, 0, 0), false, 3),
                  wirefit::ValidationError);
}

TEST_CASE("closed fits reproduce a circle with a tight periodic seam") {
  const int n = 64;
  std::vector<Vec3> pts;
  std::vector<double> params;
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * kPi * i / n;
    pts.push_back(Vec3(std::cos(theta), std::sin(theta), 0.0));
    params.push_back(theta);
  }
  std::vector<double> node_params;
  for (int i = 0; i <= 8; ++i) node_params.push_back(2.0 * kPi * i / 8.0);

  const auto fit = wirefit::fit_spline(pts, params, node_params, Vec3::Zero(),
                                       Vec3::Zero(), true, 3);
  CHECK_FALSE(fit.degraded);
  const BSplineCurve& c = fit.curve;
  CHECK(c.closed);
  CHECK(c.degree == 3);
  c.validate();

  CHECK((c.evaluate_raw(c.domain_start()) - c.evaluate_raw(c.domain_end())).norm() <=
        1e-9);
  CHECK((c.derivative_raw(c.domain_start()) - c.derivative_raw(c.domain_end())).norm() <=
        1e-9);
  for (int i = 0; i <= 500; ++i) {
    const double u = 2.0 * kPi * i / 500.0;
    CHECK(std::abs(c.evaluate(u).norm() - 1.0) < 1e-3);
  }
}

TEST_CASE("control optimization leaves an exact fit unchanged") {
  // Points sampled from the curve itself with zero distance estimates.
  const Vec3 start(0, 0, 0), end(3, 0, 0);
  BSplineCurve c;
  c.degree = 3;
  c.knots = {0, 0, 0, 0, 1.5, 3, 3, 3, 3};
  c.control_points = {start, Vec3(1, 1, 0), Vec3(1.5, -1, 1), Vec3(2, 1, 0), end};

  std::vector<Vec3> pts;
  std::vector<double> params;
  for (int i = 0; i <= 40; ++i) {
    const double u = 3.0 * i / 40.0;
    params.push_back(u);
    pts.push_back(c.evaluate(u));
  }
  const std::vector<double> dist(pts.size(), 0.0);

  const auto res = wirefit::optimize_control_points(c, pts, dist, params);
  CHECK_FALSE(res.degraded);
  CHECK(res.objective_history.front() <= 1e-18);
  CHECK(res.objective_history.back() <= 1e-18);
  for (std::size_t j = 0; j < c.control_points.size(); ++j) {
    CHECK((res.curve.control_points[j] - c.control_points[j]).norm() <= 1e-9);
  }
}

TEST_CASE("an offset spline strictly improves against the field") {
  const double r = 0.02;
  // Data on the x-axis segment; spline parallel at 2r with pinned offset ends.
  std::vector<Vec3> pts;
  std::vector<double> params;
  for (int i = 0; i <= 50; ++i) {
    const double t = i / 50.0;
    pts.push_back(Vec3(t, 0, 0));
    params.push_back(t);
  }
  const std::vector<double> dist(pts.size(), 0.0);

  BSplineCurve c;
  c.degree = 3;
  c.knots = {0, 0, 0, 0, 0.5, 1, 1, 1, 1};
  const double off = 2.0 * r;
  c.control_points = {Vec3(0, off, 0), Vec3(0.25, off, 0), Vec3(0.5, off, 0),
                      Vec3(0.75, off, 0), Vec3(1, off, 0)};

  const double before = objective_oracle(c, pts, dist, params);
  const auto res = wirefit::optimize_control_points(c, pts, dist, params);
  CHECK_FALSE(res.degraded);
  CHECK(res.objective_history.front() == doctest::Approx(before).epsilon(1e-9));
  CHECK(res.objective_history.back() < before);
  CHECK(res.objective_history.back() ==
        doctest::Approx(objective_oracle(res.curve, pts, dist, params)).epsilon(1e-9));
  for (std::size_t k = 0; k + 1 < res.objective_history.size(); ++k) {
    CHECK(res.objective_history[k + 1] <= res.objective_history[k]);
  }
  // Pinned ends stay put; interior members moved toward the data.
  CHECK((res.curve.control_points.front() - c.control_points.front()).norm() == 0.0);
  CHECK((res.curve.control_points.back() - c.control_points.back()).norm() == 0.0);
}

TEST_CASE("closed-curve optimization preserves the periodic seam") {
  const int n = 64;
  std::vector<Vec3> pts;
  std::vector<double> params;
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * kPi * i / n;
    pts.push_back(Vec3(std::cos(theta), std::sin(theta), 0.0));
    params.push_back(theta);
  }
  std::vector<double> node_params;
  for (int i = 0; i <= 8; ++i) node_params.push_back(2.0 * kPi * i / 8.0);
  const auto fit = wirefit::fit_spline(pts, params, node_params, Vec3::Zero(),
                                       Vec3::Zero(), true, 3);

  // Optimize against a field that asks the curve to sit 0.05 inside the data.
  const std::vector<double> dist(pts.size(), 0.05);
  const auto res = wirefit::optimize_control_points(fit.curve, pts, dist, params);
  CHECK_FALSE(res.degraded);
  for (std::size_t k = 0; k + 1 < res.objective_history.size(); ++k) {
    CHECK(res.objective_history[k + 1] <= res.objective_history[k]);
  }
  const BSplineCurve& c = res.curve;
  c.validate();  // periodic tail still consistent
  CHECK((c.evaluate_raw(c.domain_start()) - c.evaluate_raw(c.domain_end())).norm() <=
        1e-9);
  CHECK((c.derivative_raw(c.domain_start()) - c.derivative_raw(c.domain_end())).norm() <=
        1e-9);
}
