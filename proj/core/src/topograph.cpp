#include "wirefit/topograph.hpp"

#include "wirefit/kdtree.hpp"
#include "wirefit/parallel.hpp"
#include "wirefit/sampling.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace wirefit {

namespace {

constexpr double kNodeDedupTolerance = 1e-9;
constexpr double kInsertMargin = 1e-9;  // open interval for segment insertion

// Flip so the first non-negligible component is positive; gives every
// antipodal axis pair one canonical representative.
Vec3 canonical_axis(const Vec3& a) {
  constexpr double eps = 1e-12;
  for (int c = 0; c < 3; ++c) {
    if (a[c] > eps) return a;
    if (a[c] < -eps) return -a;
  }
  return a;
}

Vec3 principal_axis(std::span<const Vec3> points, std::span<const int> subset) {
  Vec3 mean = Vec3::Zero();
  for (int idx : subset) mean += points[idx];
  mean /= static_cast<double>(subset.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (int idx : subset) {
    const Vec3 d = points[idx] - mean;
    cov += d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  return solver.eigenvectors().col(2);  // largest eigenvalue
}

struct SegmentProjection {
  double distance = 0.0;
  double t_raw = 0.0;  // unclamped parameter
  Vec3 foot = Vec3::Zero();
};

SegmentProjection project_to_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  SegmentProjection proj;
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  proj.t_raw = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  const double t = std::clamp(proj.t_raw, 0.0, 1.0);
  proj.foot = a + t * ab;
  proj.distance = (p - proj.foot).norm();
  return proj;
}

}  // namespace

EndpointResult detect_endpoints(std::span<const Vec3> points, double local_radius,
                                double v_open_threshold) {
  if (points.size() < 2) throw ValidationError("endpoint detection needs >= 2 points");
  if (local_radius <= 0.0) throw ValidationError("local_radius must be positive");
  if (v_open_threshold <= 0.0 || v_open_threshold > 1.0) {
    throw ValidationError("v_open_threshold must lie in (0, 1]");
  }
  const int n = static_cast<int>(points.size());

  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  const Vec3 global_axis = canonical_axis(principal_axis(points, all));

  EndpointResult result;
  result.v_scores.resize(n, 0.0);

  const KdTree tree(points);
  parallel_for(static_cast<size_t>(n), [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const std::vector<int> local = tree.radius_query(points[i], local_radius);
      if (local.size() < 2) {
        result.v_scores[i] = 1.0;  // isolated point: trivially one-sided
        continue;
      }
      Vec3 axis = principal_axis(points, local);
      const double align = axis.dot(global_axis);
      if (align < 0.0) {
        axis = -axis;
      } else if (align == 0.0) {
        axis = canonical_axis(axis);
      }
      double sum = 0.0;
      for (int j : local) {
        const double tau = (points[j] - points[i]).dot(axis);
        sum += tau > 0.0 ? 1.0 : (tau < 0.0 ? -1.0 : 0.0);
      }
      result.v_scores[i] = sum / static_cast<double>(local.size());
    }
  });

  double vmax = 0.0;
  for (double v : result.v_scores) vmax = std::max(vmax, std::abs(v));
  if (vmax < v_open_threshold) {
    result.closed = true;
    return result;
  }

  std::vector<int> candidates;
  for (int i = 0; i < n; ++i) {
    if (std::abs(result.v_scores[i]) >= v_open_threshold) candidates.push_back(i);
  }

  int e0 = candidates[0];
  int e1 = -1;
  if (candidates.size() == 1) {
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      if (i == e0) continue;
      const double d = (points[i] - points[e0]).norm();
      if (d > best) {
        best = d;
        e1 = i;
      }
    }
  } else {
    double best = -1.0;
    for (size_t a = 0; a < candidates.size(); ++a) {
      for (size_t b = a + 1; b < candidates.size(); ++b) {
        const double d = (points[candidates[a]] - points[candidates[b]]).norm();
        if (d > best) {
          best = d;
          e0 = candidates[a];
          e1 = candidates[b];
        }
      }
    }
  }

  // Higher signed score first; ties keep the lower index in front.
  if (result.v_scores[e1] > result.v_scores[e0] ||
      (result.v_scores[e1] == result.v_scores[e0] && e1 < e0)) {
    std::swap(e0, e1);
  }
  result.endpoints = {e0, e1};
  return result;
}

Polyline init_closed_polyline(std::span<const Vec3> points) {
  if (points.size() < 3) throw ValidationError("closed polyline needs >= 3 points");
  Polyline poly;
  poly.closed = true;
  for (int idx : farthest_point_sampling(points, 3)) {
    poly.nodes.push_back(points[idx]);
  }
  return poly;
}

SubdivisionResult subdivide_polyline(const Polyline& init, std::span<const Vec3> points,
                                     std::span<const double> distances, double t_split,
                                     int max_depth) {
  if (points.size() != distances.size()) {
    throw ValidationError("points and distances differ in size");
  }
  if (points.empty()) throw ValidationError("subdivision needs points");
  if (t_split <= 0.0) throw ValidationError("t_split must be positive");
  if (init.segment_count() < 1) throw ValidationError("polyline has no segments");

  SubdivisionResult result;
  result.polyline = init;
  Polyline& poly = result.polyline;

  const int n = static_cast<int>(points.size());
  std::vector<double> residual(n);
  std::vector<int> nearest_seg(n);
  std::vector<double> nearest_t(n);

  for (int round = 0;; ++round) {
    const int segs = poly.segment_count();
    const int node_count = static_cast<int>(poly.nodes.size());
    parallel_for(static_cast<size_t>(n), [&](size_t begin, size_t end) {
      for (size_t i = begin; i < end; ++i) {
        double best_fit = std::numeric_limits<double>::infinity();
        int best_seg = 0;
        double best_t = 0.0;
        for (int l = 0; l < segs; ++l) {
          const Vec3& a = poly.nodes[l];
          const Vec3& b = poly.nodes[(l + 1) % node_count];
          const SegmentProjection proj = project_to_segment(points[i], a, b);
          const double fit = std::abs(proj.distance - distances[i]);
          if (fit < best_fit) {
            best_fit = fit;
            best_seg = l;
            best_t = proj.t_raw;
          }
        }
        residual[i] = best_fit;
        nearest_seg[i] = best_seg;
        nearest_t[i] = best_t;
      }
    });

    double max_res = 0.0;
    for (int i = 0; i < n; ++i) max_res = std::max(max_res, residual[i]);
    result.max_residual_history.push_back(max_res);

    if (max_res <= t_split) {
      result.reached_threshold = true;
      break;
    }
    if (round >= max_depth) {
      result.depth_exhausted = true;
      break;
    }

    // Worst insertable point; candidates in descending residual order.
    std::vector<int> order;
    for (int i = 0; i < n; ++i) {
      if (residual[i] > t_split) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (residual[a] != residual[b]) return residual[a] > residual[b];
      return a < b;
    });

    int chosen = -1;
    for (int i : order) {
      if (nearest_t[i] > kInsertMargin && nearest_t[i] < 1.0 - kInsertMargin) {
        chosen = i;
        break;
      }
    }
    if (chosen < 0) {
      result.stalled = true;
      break;
    }
    poly.nodes.insert(poly.nodes.begin() + nearest_seg[chosen] + 1, points[chosen]);
  }
  return result;
}

std::vector<int> TopologicalGraph::node_degrees() const {
  std::vector<int> degree(nodes.size(), 0);
  for (const auto& e : edges) {
    ++degree[e[0]];
    ++degree[e[1]];
  }
  return degree;
}

void TopologicalGraph::validate() const {
  if (node_corner_cluster.size() != nodes.size()) {
    throw ValidationError("graph node annotations out of sync");
  }
  for (const Vec3& p : nodes) {
    if (!p.allFinite()) throw ValidationError("graph node is not finite");
  }
  for (const auto& e : edges) {
    for (int v : e) {
      if (v < 0 || v >= static_cast<int>(nodes.size())) {
        throw ValidationError("graph edge references an invalid node");
      }
    }
  }
}

TopologicalGraph assemble_graph(const std::vector<Vec3>& corner_centers,
                                const std::vector<Polyline>& polylines,
                                double attach_radius) {
  if (attach_radius <= 0.0) throw ValidationError("attach_radius must be positive");

  TopologicalGraph graph;
  for (size_t c = 0; c < corner_centers.size(); ++c) {
    graph.nodes.push_back(corner_centers[c]);
    graph.node_corner_cluster.push_back(static_cast<int>(c));
  }

  const auto find_or_create = [&graph](const Vec3& p) {
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
      if ((graph.nodes[i] - p).norm() <= kNodeDedupTolerance) {
        return static_cast<int>(i);
      }
    }
    graph.nodes.push_back(p);
    graph.node_corner_cluster.push_back(-1);
    return static_cast<int>(graph.nodes.size() - 1);
  };

  const auto attach_or_create = [&](const Vec3& p) {
    int best = -1;
    double best_dist = attach_radius;
    for (size_t c = 0; c < corner_centers.size(); ++c) {
      const double d = (corner_centers[c] - p).norm();
      if (d < best_dist) {
        best_dist = d;
        best = static_cast<int>(c);
      }
    }
    return best >= 0 ? best : find_or_create(p);
  };

  for (const Polyline& poly : polylines) {
    if (poly.nodes.size() < 2) throw ValidationError("polyline has fewer than 2 nodes");
    const int k = static_cast<int>(poly.nodes.size());
    std::vector<int> ids(k);
    for (int i = 0; i < k; ++i) {
      const bool is_end = !poly.closed && (i == 0 || i == k - 1);
      ids[i] = is_end ? attach_or_create(poly.nodes[i]) : find_or_create(poly.nodes[i]);
    }
    const int limit = poly.closed ? k : k - 1;
    for (int i = 0; i < limit; ++i) {
      const int a = ids[i];
      const int b = ids[(i + 1) % k];
      if (a == b) continue;  // both ends collapsed into one node
      graph.edges.push_back({a, b});
    }
  }
  graph.validate();
  return graph;
}

GraphProjection project_to_graph(const TopologicalGraph& graph, const Vec3& p) {
  if (graph.edges.empty()) throw ValidationError("graph has no edges");
  GraphProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const SegmentProjection proj =
        project_to_segment(p, graph.nodes[graph.edges[e][0]], graph.nodes[graph.edges[e][1]]);
    if (proj.distance < best.distance) {
      best.edge = static_cast<int>(e);
      best.t = std::clamp(proj.t_raw, 0.0, 1.0);
      best.foot = proj.foot;
      best.distance = proj.distance;
    }
  }
  return best;
}

namespace {

double graph_objective(const TopologicalGraph& graph, std::span<const Vec3> points,
                       std::span<const double> distances) {
  std::vector<double> per_point(points.size());
  parallel_for(points.size(), [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const GraphProjection proj = project_to_graph(graph, points[i]);
      const double r = proj.distance - distances[i];
      per_point[i] = r * r;
    }
  });
  double sum = 0.0;
  for (double v : per_point) sum += v;
  return sum;
}

}  // namespace

NodeOptimizationResult optimize_node_positions(const TopologicalGraph& graph,
                                               std::span<const Vec3> points,
                                               std::span<const double> distances,
                                               int max_iterations,
                                               double step_tolerance) {
  if (points.size() != distances.size()) {
    throw ValidationError("points and distances differ in size");
  }
  if (points.empty()) throw ValidationError("node optimization needs points");
  graph.validate();

  NodeOptimizationResult result;
  result.graph = graph;
  TopologicalGraph& g = result.graph;
  const int n = static_cast<int>(g.nodes.size());

  double objective = graph_objective(g, points, distances);
  result.objective_history.push_back(objective);

  std::vector<GraphProjection> assignment(points.size());
  for (int iter = 0; iter < max_iterations; ++iter) {
    parallel_for(points.size(), [&](size_t begin, size_t end) {
      for (size_t i = begin; i < end; ++i) assignment[i] = project_to_graph(g, points[i]);
    });

    // Normal equations shared by all three coordinates.
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 3);
    for (size_t i = 0; i < points.size(); ++i) {
      const GraphProjection& proj = assignment[i];
      const int a = g.edges[proj.edge][0];
      const int b = g.edges[proj.edge][1];
      const double wa = 1.0 - proj.t;
      const double wb = proj.t;
      Vec3 target = points[i];
      if (proj.distance > 1e-12) {
        target += distances[i] * (proj.foot - points[i]) / proj.distance;
      }
      m(a, a) += wa * wa;
      m(b, b) += wb * wb;
      m(a, b) += wa * wb;
      m(b, a) += wa * wb;
      rhs.row(a) += wa * target.transpose();
      rhs.row(b) += wb * target.transpose();
    }
    for (int k = 0; k < n; ++k) {
      if (m(k, k) == 0.0) {
        m(k, k) = 1.0;
        rhs.row(k) = g.nodes[k].transpose();
      }
    }

    const Eigen::MatrixXd solved = m.ldlt().solve(rhs);
    if (!solved.allFinite()) break;

    std::vector<Vec3> old_nodes = g.nodes;
    Eigen::MatrixXd delta(n, 3);
    for (int k = 0; k < n; ++k) {
      delta.row(k) = solved.row(k) - old_nodes[k].transpose();
    }

    double scale = 1.0;
    double candidate_objective = 0.0;
    bool accepted = false;
    for (int halving = 0; halving <= 12; ++halving) {
      for (int k = 0; k < n; ++k) {
        g.nodes[k] = old_nodes[k] + scale * Vec3(delta.row(k).transpose());
      }
      candidate_objective = graph_objective(g, points, distances);
      if (candidate_objective <= objective) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      g.nodes = old_nodes;
      break;
    }

    double max_move = 0.0;
    for (int k = 0; k < n; ++k) {
      max_move = std::max(max_move, scale * delta.row(k).norm());
    }
    objective = candidate_objective;
    result.objective_history.push_back(objective);
    result.iterations = iter + 1;
    if (max_move < step_tolerance) break;
  }
  return result;
}

std::vector<int> reconcile_corners(const TopologicalGraph& graph) {
  const std::vector<int> degree = graph.node_degrees();
  std::vector<int> corners;
  for (size_t i = 0; i < degree.size(); ++i) {
    if (degree[i] != 2) corners.push_back(static_cast<int>(i));
  }
  return corners;
}

}  // namespace wirefit
