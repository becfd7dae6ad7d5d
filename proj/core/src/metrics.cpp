#include "wirefit/metrics.hpp"

#include "wirefit/kdtree.hpp"
#include "wirefit/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace wirefit {

std::vector<Vec3> sample_wireframe(const Wireframe& wf, double spacing) {
  if (wf.curves.empty()) throw ValidationError("wireframe has no curves to sample");
  std::vector<Vec3> samples;
  for (const BSplineCurve& curve : wf.curves) {
    const std::vector<Vec3> s = sample_curve(curve, spacing);
    samples.insert(samples.end(), s.begin(), s.end());
  }
  return samples;
}

namespace {

// Per-point nearest-neighbor distances from a into b, in index order.
std::vector<double> nearest_distances(std::span<const Vec3> a, std::span<const Vec3> b) {
  const KdTree tree(b);
  std::vector<double> dist(a.size());
  parallel_for(a.size(), [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) dist[i] = tree.nearest(a[i]).second;
  });
  return dist;
}

}  // namespace

double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw ValidationError("chamfer needs non-empty sets");
  const std::vector<double> ab = nearest_distances(a, b);
  const std::vector<double> ba = nearest_distances(b, a);
  double sum_ab = 0.0;
  for (double d : ab) sum_ab += d;
  double sum_ba = 0.0;
  for (double d : ba) sum_ba += d;
  return 0.5 * (sum_ab / static_cast<double>(a.size()) +
                sum_ba / static_cast<double>(b.size()));
}

double hausdorff_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw ValidationError("hausdorff needs non-empty sets");
  const std::vector<double> ab = nearest_distances(a, b);
  const std::vector<double> ba = nearest_distances(b, a);
  double worst = 0.0;
  for (double d : ab) worst = std::max(worst, d);
  for (double d : ba) worst = std::max(worst, d);
  return worst;
}

EvaluationReport evaluate_wireframes(const Wireframe& pred, const Wireframe& truth,
                                     double spacing) {
  if (spacing <= 0.0) throw ValidationError("sample spacing must be positive");
  if (truth.curves.empty()) throw ValidationError("truth wireframe has no curves");

  EvaluationReport report;
  report.sample_spacing = spacing;
  report.pred_curves = static_cast<int>(pred.curves.size());
  report.truth_curves = static_cast<int>(truth.curves.size());
  report.pred_corners = static_cast<int>(pred.corners.size());
  report.truth_corners = static_cast<int>(truth.corners.size());

  const std::vector<Vec3> truth_samples = sample_wireframe(truth, spacing);
  report.truth_samples = static_cast<int>(truth_samples.size());

  if (pred.curves.empty()) {
    report.failed = true;
    report.chamfer = std::numeric_limits<double>::quiet_NaN();
    report.hausdorff = std::numeric_limits<double>::quiet_NaN();
    return report;
  }

  const std::vector<Vec3> pred_samples = sample_wireframe(pred, spacing);
  report.pred_samples = static_cast<int>(pred_samples.size());
  report.chamfer = chamfer_distance(pred_samples, truth_samples);
  report.hausdorff = hausdorff_distance(pred_samples, truth_samples);
  return report;
}

std::string report_to_json(const EvaluationReport& report) {
  nlohmann::json j;
  j["chamfer"] = report.chamfer;      // NaN serializes as null
  j["hausdorff"] = report.hausdorff;
  j["failed"] = report.failed;
  j["degraded_curves"] = report.degraded_curves;
  j["sample_spacing"] = report.sample_spacing;
  j["pred_samples"] = report.pred_samples;
  j["truth_samples"] = report.truth_samples;
  j["pred_curves"] = report.pred_curves;
  j["truth_curves"] = report.truth_curves;
  j["pred_corners"] = report.pred_corners;
  j["truth_corners"] = report.truth_corners;
  return j.dump(2);
}

std::string report_table_header() {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-28s %12s %12s %6s %8s %8s %8s %8s\n", "name",
                "chamfer", "hausdorff", "fail", "crv/out", "crv/ref", "cor/out",
                "cor/ref");
  return buf;
}

std::string report_table_row(const std::string& name, const EvaluationReport& report) {
  char buf[200];
  if (report.failed) {
    std::snprintf(buf, sizeof(buf), "%-28s %12s %12s %6s %8d %8d %8d %8d\n",
                  name.c_str(), "-", "-", "yes", report.pred_curves,
                  report.truth_curves, report.pred_corners, report.truth_corners);
  } else {
    std::snprintf(buf, sizeof(buf), "%-28s %12.6f %12.6f %6s %8d %8d %8d %8d\n",
                  name.c_str(), report.chamfer, report.hausdorff, "no",
                  report.pred_curves, report.truth_curves, report.pred_corners,
                  report.truth_corners);
  }
  return buf;
}

}  // namespace wirefit
