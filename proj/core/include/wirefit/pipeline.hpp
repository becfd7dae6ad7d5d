#pragma once

#include "wirefit/corners.hpp"
#include "wirefit/segmentation.hpp"
#include "wirefit/splinefit.hpp"
#include "wirefit/topograph.hpp"
#include "wirefit/types.hpp"
#include "wirefit/wireframe.hpp"

#include <string>
#include <vector>

namespace wirefit {

/// Tuning knobs of the extraction pipeline. Lengths suffixed _factor are
/// multiples of the sampling distance r.
struct PipelineConfig {
  double r = 0.0;                    // 0: take r from the input cloud
  double t_dist_factor = 1.5;        // skeleton threshold
  double r_corner_factor = 4.0;      // PCA neighborhood radius
  double t_variance = 0.3;           // corner test on the middle variance ratio
  double t_corner = 1.5;             // cornerness weight threshold
  // Fraction of skeleton points used as PCA query centers. Corner votes only
  // clear t_corner when several corner-like neighborhoods overlap, which needs
  // near-total coverage; lower values trade corner recall for speed.
  double fps_ratio = 1.0;
  double merge_radius_factor = 4.0;  // corner candidate single-linkage radius
  double connect_radius_factor = 1.5;
  int min_cluster_size = 3;
  double endpoint_radius_factor = 4.0;  // local one-sidedness neighborhood
  double v_open_threshold = 0.6;
  double t_split_factor = 4.0;  // subdivision residual threshold
  int max_subdivision_depth = 24;
  double attach_radius_factor = 12.0;  // endpoint-to-corner snapping
  int node_opt_iterations = 30;
  int ctrl_opt_iterations = 20;
  int spline_degree = 3;

  void validate() const;
};

struct StageTiming {
  std::string stage;
  double milliseconds = 0.0;
};

/// Run accounting: stage timings, stage counts, and the membership
/// reconciliation skeleton = corner members + curve members + discarded.
struct RunManifest {
  PipelineConfig config;  // effective configuration, echoed for provenance
  int input_points = 0;
  double r = 0.0;
  int skeleton_points = 0;
  int corner_clusters = 0;
  int corner_members = 0;  // unique skeleton points claimed by corners
  int curve_clusters = 0;
  int curve_members = 0;
  int discarded_points = 0;
  int graph_nodes = 0;
  int graph_edges = 0;
  int output_corners = 0;
  int output_curves = 0;
  std::vector<StageTiming> timings;
  std::vector<std::string> warnings;
};

std::string manifest_to_json(const RunManifest& manifest);

/// Full pipeline output with every intermediate stage kept for inspection.
struct PipelineResult {
  Wireframe wireframe;
  RunManifest manifest;

  SharpSkeleton skeleton;
  std::vector<double> weights;
  std::vector<CornerCluster> corner_clusters;
  std::vector<CurveCluster> curve_clusters;
  std::vector<int> discarded;
  std::vector<EndpointResult> endpoint_results;        // per curve cluster
  std::vector<std::vector<double>> subdivision_histories;  // per curve cluster
  TopologicalGraph graph;
  std::vector<double> node_objective_history;
  std::vector<CurvePath> paths;                         // aligned with curves
  std::vector<std::vector<double>> control_objective_histories;
};

/// Point cloud with distance estimates in, parametric wireframe out.
/// Throws PipelineError(no_sharp_features) when no point passes the skeleton
/// threshold and PipelineError(no_curves) when segmentation leaves nothing.
PipelineResult extract_wireframe(const PointCloudField& cloud,
                                 const PipelineConfig& config = {});

}  // namespace wirefit
