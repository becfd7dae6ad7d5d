#include "wirefit/pipeline.hpp"

#include "wirefit/point_cloud.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace wirefit {

void PipelineConfig::validate() const {
  if (r < 0.0) throw ValidationError("r must be non-negative");
  if (t_dist_factor <= 0.0) throw ValidationError("t_dist_factor must be positive");
  if (r_corner_factor <= 0.0) throw ValidationError("r_corner_factor must be positive");
  if (t_variance < 0.0 || t_variance >= 1.0) {
    throw ValidationError("t_variance must lie in [0, 1)");
  }
  if (fps_ratio <= 0.0 || fps_ratio > 1.0) {
    throw ValidationError("fps_ratio must lie in (0, 1]");
  }
  if (merge_radius_factor <= 0.0) {
    throw ValidationError("merge_radius_factor must be positive");
  }
  if (connect_radius_factor <= 0.0) {
    throw ValidationError("connect_radius_factor must be positive");
  }
  if (min_cluster_size < 3) throw ValidationError("min_cluster_size must be >= 3");
  if (endpoint_radius_factor <= 0.0) {
    throw ValidationError("endpoint_radius_factor must be positive");
  }
  if (v_open_threshold <= 0.0 || v_open_threshold > 1.0) {
    throw ValidationError("v_open_threshold must lie in (0, 1]");
  }
  if (t_split_factor <= 0.0) throw ValidationError("t_split_factor must be positive");
  if (max_subdivision_depth < 0) {
    throw ValidationError("max_subdivision_depth must be non-negative");
  }
  if (attach_radius_factor <= 0.0) {
    throw ValidationError("attach_radius_factor must be positive");
  }
  if (node_opt_iterations < 0 || ctrl_opt_iterations < 0) {
    throw ValidationError("iteration counts must be non-negative");
  }
  if (spline_degree < 1 || spline_degree > 3) {
    throw ValidationError("spline_degree must lie in [1, 3]");
  }
}

std::string manifest_to_json(const RunManifest& manifest) {
  nlohmann::json j;
  const PipelineConfig& c = manifest.config;
  j["config"] = {{"r", c.r},
                 {"t_dist_factor", c.t_dist_factor},
                 {"r_corner_factor", c.r_corner_factor},
                 {"t_variance", c.t_variance},
                 {"t_corner", c.t_corner},
                 {"fps_ratio", c.fps_ratio},
                 {"merge_radius_factor", c.merge_radius_factor},
                 {"connect_radius_factor", c.connect_radius_factor},
                 {"min_cluster_size", c.min_cluster_size},
                 {"endpoint_radius_factor", c.endpoint_radius_factor},
                 {"v_open_threshold", c.v_open_threshold},
                 {"t_split_factor", c.t_split_factor},
                 {"max_subdivision_depth", c.max_subdivision_depth},
                 {"attach_radius_factor", c.attach_radius_factor},
                 {"node_opt_iterations", c.node_opt_iterations},
                 {"ctrl_opt_iterations", c.ctrl_opt_iterations},
                 {"spline_degree", c.spline_degree}};
  j["input_points"] = manifest.input_points;
  j["r"] = manifest.r;
  j["skeleton_points"] = manifest.skeleton_points;
  j["corner_clusters"] = manifest.corner_clusters;
  j["corner_members"] = manifest.corner_members;
  j["curve_clusters"] = manifest.curve_clusters;
  j["curve_members"] = manifest.curve_members;
  j["discarded_points"] = manifest.discarded_points;
  j["graph_nodes"] = manifest.graph_nodes;
  j["graph_edges"] = manifest.graph_edges;
  j["output_corners"] = manifest.output_corners;
  j["output_curves"] = manifest.output_curves;
  j["timings"] = nlohmann::json::array();
  for (const StageTiming& t : manifest.timings) {
    j["timings"].push_back({{"stage", t.stage}, {"ms", t.milliseconds}});
  }
  j["warnings"] = manifest.warnings;
  return j.dump(2);
}

namespace {

class StageClock {
 public:
  explicit StageClock(RunManifest& manifest) : manifest_(manifest) {}

  void finish(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration<double, std::milli>(now - last_).count();
    manifest_.timings.push_back({stage, ms});
    last_ = now;
  }

 private:
  RunManifest& manifest_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

PipelineResult extract_wireframe(const PointCloudField& cloud,
                                 const PipelineConfig& config) {
  config.validate();
  cloud.validate();

  PipelineResult result;
  RunManifest& manifest = result.manifest;
  StageClock clock(manifest);

  const double r = config.r > 0.0 ? config.r : cloud.sampling_distance_r;
  if (r <= 0.0) throw ValidationError("sampling distance r is not available");
  manifest.config = config;
  manifest.input_points = static_cast<int>(cloud.size());
  manifest.r = r;

  // 1. Distance-threshold skeleton.
  result.skeleton = extract_skeleton(cloud, config.t_dist_factor * r);
  manifest.skeleton_points = static_cast<int>(result.skeleton.size());
  clock.finish("skeleton");

  // 2. Corner detection.
  const std::vector<NeighborhoodLabel> labels = classify_neighborhoods(
      result.skeleton, config.r_corner_factor * r, config.t_variance, config.fps_ratio);
  result.weights = cornerness_weights(result.skeleton, labels);
  result.corner_clusters = detect_corner_clusters(
      result.skeleton, result.weights, config.t_corner, config.merge_radius_factor * r);
  manifest.corner_clusters = static_cast<int>(result.corner_clusters.size());
  {
    std::vector<char> claimed(result.skeleton.size(), 0);
    for (const CornerCluster& c : result.corner_clusters) {
      for (int idx : c.member_indices) claimed[idx] = 1;
    }
    manifest.corner_members =
        static_cast<int>(std::count(claimed.begin(), claimed.end(), char(1)));
  }
  clock.finish("corners");

  // 3. Curve segmentation.
  result.curve_clusters =
      segment_curves(result.skeleton, result.corner_clusters,
                     config.connect_radius_factor * r, config.min_cluster_size,
                     &result.discarded);
  if (result.curve_clusters.empty()) {
    throw PipelineError(PipelineError::Fail::no_curves,
                        "segmentation produced no curve clusters");
  }
  manifest.curve_clusters = static_cast<int>(result.curve_clusters.size());
  for (const CurveCluster& c : result.curve_clusters) {
    manifest.curve_members += static_cast<int>(c.member_indices.size());
  }
  manifest.discarded_points = static_cast<int>(result.discarded.size());
  clock.finish("segmentation");

  // 4. Per-cluster proto-polylines.
  std::vector<Polyline> polylines;
  polylines.reserve(result.curve_clusters.size());
  for (size_t c = 0; c < result.curve_clusters.size(); ++c) {
    const CurveCluster& cluster = result.curve_clusters[c];
    std::vector<Vec3> pts(cluster.member_indices.size());
    std::vector<double> dists(cluster.member_indices.size());
    for (size_t i = 0; i < cluster.member_indices.size(); ++i) {
      pts[i] = result.skeleton.positions[cluster.member_indices[i]];
      dists[i] = result.skeleton.distances[cluster.member_indices[i]];
    }

    const EndpointResult ends =
        detect_endpoints(pts, config.endpoint_radius_factor * r, config.v_open_threshold);
    result.endpoint_results.push_back(ends);

    Polyline init;
    if (ends.closed) {
      init = init_closed_polyline(pts);
    } else {
      init.closed = false;
      init.nodes = {pts[ends.endpoints[0]], pts[ends.endpoints[1]]};
    }

    SubdivisionResult sub = subdivide_polyline(init, pts, dists,
                                               config.t_split_factor * r,
                                               config.max_subdivision_depth);
    if (sub.depth_exhausted) {
      manifest.warnings.push_back("cluster " + std::to_string(c) +
                                  ": subdivision stopped at max depth");
    }
    if (sub.stalled) {
      manifest.warnings.push_back("cluster " + std::to_string(c) +
                                  ": subdivision stalled on blocked points");
    }
    result.subdivision_histories.push_back(sub.max_residual_history);
    polylines.push_back(std::move(sub.polyline));
  }
  clock.finish("polylines");

  // 5. Topology graph and node optimization over corner + curve members.
  std::vector<Vec3> corner_centers(result.corner_clusters.size());
  for (size_t i = 0; i < corner_centers.size(); ++i) {
    corner_centers[i] = result.corner_clusters[i].center;
  }
  TopologicalGraph assembled =
      assemble_graph(corner_centers, polylines, config.attach_radius_factor * r);

  std::vector<Vec3> opt_points;
  std::vector<double> opt_dists;
  {
    std::vector<char> in_opt(result.skeleton.size(), 0);
    for (const CornerCluster& c : result.corner_clusters) {
      for (int idx : c.member_indices) in_opt[idx] = 1;
    }
    for (const CurveCluster& c : result.curve_clusters) {
      for (int idx : c.member_indices) in_opt[idx] = 1;
    }
    for (size_t i = 0; i < in_opt.size(); ++i) {
      if (in_opt[i]) {
        opt_points.push_back(result.skeleton.positions[i]);
        opt_dists.push_back(result.skeleton.distances[i]);
      }
    }
  }

  NodeOptimizationResult node_opt = optimize_node_positions(
      assembled, opt_points, opt_dists, config.node_opt_iterations);
  result.graph = std::move(node_opt.graph);
  result.node_objective_history = std::move(node_opt.objective_history);
  manifest.graph_nodes = static_cast<int>(result.graph.nodes.size());
  manifest.graph_edges = static_cast<int>(result.graph.edges.size());
  clock.finish("graph");

  // 6. Paths, parameterization, spline fits.
  result.paths = partition_into_paths(result.graph);

  std::vector<int> edge_path(result.graph.edges.size(), -1);
  std::vector<int> edge_segment(result.graph.edges.size(), -1);
  for (size_t p = 0; p < result.paths.size(); ++p) {
    for (size_t s = 0; s < result.paths[p].edge_ids.size(); ++s) {
      edge_path[result.paths[p].edge_ids[s]] = static_cast<int>(p);
      edge_segment[result.paths[p].edge_ids[s]] = static_cast<int>(s);
    }
  }

  struct PathData {
    std::vector<Vec3> points;
    std::vector<double> dists;
    std::vector<double> params;
  };
  std::vector<PathData> per_path(result.paths.size());
  std::vector<std::vector<double>> path_breaks(result.paths.size());
  for (size_t p = 0; p < result.paths.size(); ++p) {
    path_breaks[p] = parameterize_path(result.graph, result.paths[p]);
  }

  for (size_t i = 0; i < opt_points.size(); ++i) {
    const GraphProjection proj = project_to_graph(result.graph, opt_points[i]);
    const int p = edge_path[proj.edge];
    if (p < 0) continue;
    const int seg = edge_segment[proj.edge];
    const CurvePath& path = result.paths[p];
    // Edge orientation inside the path may be flipped.
    const bool forward = result.graph.edges[proj.edge][0] == path.node_ids[seg];
    const double t_local = forward ? proj.t : 1.0 - proj.t;
    const double u = path_breaks[p][seg] +
                     t_local * (path_breaks[p][seg + 1] - path_breaks[p][seg]);
    per_path[p].points.push_back(opt_points[i]);
    per_path[p].dists.push_back(opt_dists[i]);
    per_path[p].params.push_back(u);
  }

  for (size_t p = 0; p < result.paths.size(); ++p) {
    const CurvePath& path = result.paths[p];
    const Vec3 start = result.graph.nodes[path.node_ids.front()];
    const Vec3 end = result.graph.nodes[path.node_ids.back()];
    const PathData& data = per_path[p];

    BSplineCurve fitted;
    if (data.points.empty()) {
      // Nothing projected here; keep the polyline geometry.
      manifest.warnings.push_back("path " + std::to_string(p) +
                                  ": no supporting points, kept as polyline");
      BSplineCurve poly;
      poly.degree = 1;
      poly.closed = path.closed;
      if (!path.closed) {
        poly.knots.push_back(path_breaks[p].front());
        for (double b : path_breaks[p]) poly.knots.push_back(b);
        poly.knots.push_back(path_breaks[p].back());
        for (int id : path.node_ids) poly.control_points.push_back(result.graph.nodes[id]);
      } else {
        const int m = static_cast<int>(path.node_ids.size());
        const double period = path_breaks[p].back();
        poly.knots.push_back(path_breaks[p][m - 1] - period);
        for (double b : path_breaks[p]) poly.knots.push_back(b);
        poly.knots.push_back(path_breaks[p][1] + period);
        for (int id : path.node_ids) poly.control_points.push_back(result.graph.nodes[id]);
        poly.control_points.push_back(result.graph.nodes[path.node_ids[0]]);
      }
      poly.validate();
      fitted = std::move(poly);
      result.control_objective_histories.emplace_back();
    } else {
      SplineFitResult fit = fit_spline(data.points, data.params, path_breaks[p], start,
                                       end, path.closed, config.spline_degree);
      if (fit.degraded) {
        manifest.warnings.push_back("path " + std::to_string(p) +
                                    ": fit degraded to a simpler model");
      }
      ControlOptimizationResult opt = optimize_control_points(
          fit.curve, data.points, data.dists, data.params, config.ctrl_opt_iterations);
      if (opt.degraded) {
        manifest.warnings.push_back("path " + std::to_string(p) +
                                    ": control optimization reverted");
      }
      fitted = std::move(opt.curve);
      result.control_objective_histories.push_back(std::move(opt.objective_history));
    }
    result.wireframe.curves.push_back(std::move(fitted));
  }

  // 7. Corners: nodes whose degree differs from 2.
  for (int node : reconcile_corners(result.graph)) {
    result.wireframe.corners.push_back(result.graph.nodes[node]);
  }
  manifest.output_corners = static_cast<int>(result.wireframe.corners.size());
  manifest.output_curves = static_cast<int>(result.wireframe.curves.size());
  clock.finish("splines");

  result.wireframe.validate();
  return result;
}

}  // namespace wirefit
