#pragma once

#include "wirefit/types.hpp"
#include "wirefit/wireframe.hpp"

#include <span>
#include <string>
#include <vector>

namespace wirefit {

/// Arc-length samples of every curve, concatenated in curve order.
std::vector<Vec3> sample_wireframe(const Wireframe& wf, double spacing);

/// Symmetric chamfer distance: the average of the two directed mean
/// nearest-neighbor distances, halved:
///   0.5 * (mean_a min_b |a-b|  +  mean_b min_a |a-b|) / ... see report.
/// Exactly: 0.5 * (directed(a,b) + directed(b,a)) with directed = mean of
/// per-point nearest distances.
double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b);

/// Symmetric Hausdorff distance: max over both directed sup-inf distances.
double hausdorff_distance(std::span<const Vec3> a, std::span<const Vec3> b);

struct EvaluationReport {
  double chamfer = 0.0;
  double hausdorff = 0.0;
  bool failed = false;       // predicted wireframe was empty; distances unset (NaN)
  int degraded_curves = 0;   // filled by callers that know fit degradation
  double sample_spacing = 0.0;
  int pred_samples = 0;
  int truth_samples = 0;
  int pred_curves = 0;
  int truth_curves = 0;
  int pred_corners = 0;
  int truth_corners = 0;
};

/// Samples both wireframes at `spacing` and compares the sample sets.
/// An empty predicted wireframe marks the report failed (distances NaN);
/// an empty truth wireframe is a caller error.
EvaluationReport evaluate_wireframes(const Wireframe& pred, const Wireframe& truth,
                                     double spacing);

std::string report_to_json(const EvaluationReport& report);

/// Fixed-width table: header_row() once, then one report_row per comparison.
std::string report_table_header();
std::string report_table_row(const std::string& name, const EvaluationReport& report);

}  // namespace wirefit
