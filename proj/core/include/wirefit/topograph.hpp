#pragma once

#include "wirefit/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace wirefit {

/// Open/closed endpoint analysis of one curve cluster. Each point gets a
/// one-sidedness score V: the mean projection sign of its local neighborhood
/// onto the local principal axis. Interior points balance out near 0 while
/// curve ends approach +-1.
struct EndpointResult {
  bool closed = false;
  std::array<int, 2> endpoints = {-1, -1};  // indices into the input span
  std::vector<double> v_scores;             // signed V per point
};

/// Scores every point over its local_radius ball; the cluster is closed when
/// max |V| falls below v_open_threshold. For open clusters the endpoints are
/// the farthest-apart pair among points with |V| >= v_open_threshold, the
/// higher-V end first.
EndpointResult detect_endpoints(std::span<const Vec3> points, double local_radius,
                                double v_open_threshold);

/// Piecewise-linear proto-curve. Segment l joins nodes[l] and nodes[l+1];
/// closed polylines wrap the last node back to the first.
struct Polyline {
  std::vector<Vec3> nodes;
  bool closed = false;

  int segment_count() const {
    const int n = static_cast<int>(nodes.size());
    return closed ? n : n - 1;
  }
};

/// Three farthest-point-sampled nodes as the seed triangle for a closed run.
Polyline init_closed_polyline(std::span<const Vec3> points);

struct SubdivisionResult {
  Polyline polyline;
  std::vector<double> max_residual_history;  // one entry per round, pre-split
  bool reached_threshold = false;            // residuals dropped below t_split
  bool depth_exhausted = false;              // stopped at max_depth instead
  bool stalled = false;                      // every over-threshold point blocked
};

/// Recursive refinement. Each round scores every point by
/// min over segments of | d_hat - distance(point, segment) | and inserts the
/// worst point into the segment realizing that min, until the worst residual
/// is at most t_split. Points projecting onto a segment endpoint cannot be
/// inserted there; the round falls through to the next-worst insertable point.
SubdivisionResult subdivide_polyline(const Polyline& init, std::span<const Vec3> points,
                                     std::span<const double> distances, double t_split,
                                     int max_depth);

/// Wireframe topology: positioned nodes joined by straight edges.
struct TopologicalGraph {
  std::vector<Vec3> nodes;
  std::vector<std::array<int, 2>> edges;
  std::vector<int> node_corner_cluster;  // corner-cluster id or -1

  std::vector<int> node_degrees() const;
  void validate() const;
};

/// Merges per-cluster polylines with corner centroids: an open polyline end
/// snaps to the nearest corner centroid within attach_radius, otherwise it
/// becomes its own node (positions within 1e-9 reuse an existing node).
/// Closed polylines contribute an edge cycle.
TopologicalGraph assemble_graph(const std::vector<Vec3>& corner_centers,
                                const std::vector<Polyline>& polylines,
                                double attach_radius);

/// Closest graph edge per query point, lowest edge index on ties.
struct GraphProjection {
  int edge = -1;
  double t = 0.0;  // barycentric position along the edge
  Vec3 foot = Vec3::Zero();
  double distance = 0.0;
};

GraphProjection project_to_graph(const TopologicalGraph& graph, const Vec3& p);

struct NodeOptimizationResult {
  TopologicalGraph graph;
  std::vector<double> objective_history;  // initial value plus every accepted step
  int iterations = 0;
};

/// Moves node positions so each point's distance to the graph matches its
/// distance estimate: alternating nearest-edge assignment and a damped
/// Gauss-Newton step on sum((|p - proj| - d_hat)^2). The recorded objective
/// never increases; steps that would increase it are halved away.
NodeOptimizationResult optimize_node_positions(const TopologicalGraph& graph,
                                               std::span<const Vec3> points,
                                               std::span<const double> distances,
                                               int max_iterations = 30,
                                               double step_tolerance = 1e-10);

/// Nodes whose edge degree differs from 2: the output corner set.
std::vector<int> reconcile_corners(const TopologicalGraph& graph);

}  // namespace wirefit
