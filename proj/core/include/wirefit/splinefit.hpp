#pragma once

#include "wirefit/bspline.hpp"
#include "wirefit/topograph.hpp"
#include "wirefit/types.hpp"

#include <span>
#include <vector>

namespace wirefit {

/// A maximal run of graph edges between corners (or a cycle of degree-2
/// nodes). edge_ids[j] joins node_ids[j] to node_ids[j+1] (wrapping when
/// closed); a lollipop chain that returns to its corner stays open with
/// node_ids.front() == node_ids.back().
struct CurvePath {
  std::vector<int> node_ids;
  std::vector<int> edge_ids;
  bool closed = false;

  int segment_count() const { return static_cast<int>(edge_ids.size()); }
};

/// Splits the graph into corner-to-corner chains plus leftover cycles.
/// Chains start at corner nodes in ascending order, taking incident edges in
/// ascending edge index; cycles start at their lowest remaining edge. Every
/// edge lands in exactly one path; a degree-2 walk that cannot continue
/// uniquely raises std::logic_error.
std::vector<CurvePath> partition_into_paths(const TopologicalGraph& graph);

/// Cumulative arc-length parameters of the path nodes: one value per node for
/// open paths, plus the closing wrap (total length) for closed paths.
std::vector<double> parameterize_path(const TopologicalGraph& graph,
                                      const CurvePath& path);

struct SplineFitResult {
  BSplineCurve curve;
  bool degraded = false;  // fit fell back to a simpler model
};

/// Least-squares B-spline through (params[i] -> points[i]). Open fits use a
/// clamped knot vector with interior knots at the node parameters, pinning
/// the end control points to `start`/`end`; closed fits use the periodic
/// layout over node-parameter breakpoints. Knot spans without parameters are
/// merged away, and the degree drops when too few spans remain.
SplineFitResult fit_spline(std::span<const Vec3> points, std::span<const double> params,
                           std::span<const double> node_params, const Vec3& start,
                           const Vec3& end, bool closed, int degree);

struct ControlOptimizationResult {
  BSplineCurve curve;
  std::vector<double> objective_history;  // initial value plus accepted steps
  int iterations = 0;
  bool degraded = false;  // solver produced non-finite values; curve reverted
};

/// Refines control points so each point's distance to the curve matches its
/// estimate, holding the parameters fixed: damped Gauss-Newton on
/// sum((|C(u_i) - p_i| - d_hat_i)^2). Open curves keep their pinned end
/// control points; closed curves update base controls with the periodic tail
/// following along. The recorded objective never increases.
ControlOptimizationResult optimize_control_points(const BSplineCurve& curve,
                                                  std::span<const Vec3> points,
                                                  std::span<const double> distances,
                                                  std::span<const double> params,
                                                  int max_iterations = 20);

}  // namespace wirefit
