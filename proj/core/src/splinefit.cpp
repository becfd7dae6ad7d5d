#include "wirefit/splinefit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wirefit {

namespace {

int other_endpoint(const TopologicalGraph& graph, int edge, int node) {
  const auto& e = graph.edges[edge];
  return e[0] == node ? e[1] : e[0];
}

}  // namespace

std::vector<CurvePath> partition_into_paths(const TopologicalGraph& graph) {
  graph.validate();
  const int n_nodes = static_cast<int>(graph.nodes.size());
  const int n_edges = static_cast<int>(graph.edges.size());

  std::vector<std::vector<int>> incident(n_nodes);
  for (int e = 0; e < n_edges; ++e) {
    incident[graph.edges[e][0]].push_back(e);
    incident[graph.edges[e][1]].push_back(e);
  }
  const std::vector<int> degree = graph.node_degrees();

  std::vector<char> used(n_edges, 0);
  std::vector<CurvePath> paths;

  // Corner-to-corner chains.
  for (int v = 0; v < n_nodes; ++v) {
    if (degree[v] == 2) continue;
    for (int e : incident[v]) {
      if (used[e]) continue;
      CurvePath path;
      path.node_ids.push_back(v);
      int cur = v;
      int edge = e;
      while (true) {
        used[edge] = 1;
        path.edge_ids.push_back(edge);
        cur = other_endpoint(graph, edge, cur);
        path.node_ids.push_back(cur);
        if (degree[cur] != 2) break;
        int next_edge = -1;
        for (int cand : incident[cur]) {
          if (!used[cand]) {
            next_edge = cand;
            break;
          }
        }
        if (next_edge < 0) {
          throw std::logic_error("path walk dead-ended at a degree-2 node");
        }
        edge = next_edge;
      }
      paths.push_back(std::move(path));
    }
  }

  // Remaining edges are cycles of degree-2 nodes.
  for (int e = 0; e < n_edges; ++e) {
    if (used[e]) continue;
    CurvePath path;
    path.closed = true;
    const int start = std::min(graph.edges[e][0], graph.edges[e][1]);
    int cur = start;
    int edge = e;
    while (true) {
      used[edge] = 1;
      path.node_ids.push_back(cur);
      path.edge_ids.push_back(edge);
      cur = other_endpoint(graph, edge, cur);
      if (cur == start) break;
      if (degree[cur] != 2) throw std::logic_error("leftover cycle touches a corner");
      int next_edge = -1;
      for (int cand : incident[cur]) {
        if (!used[cand]) {
          next_edge = cand;
          break;
        }
      }
      if (next_edge < 0) throw std::logic_error("leftover cycle is broken");
      edge = next_edge;
    }
    paths.push_back(std::move(path));
  }

  for (char u : used) {
    if (!u) throw std::logic_error("edge escaped path partition");
  }
  return paths;
}

std::vector<double> parameterize_path(const TopologicalGraph& graph,
                                      const CurvePath& path) {
  if (path.node_ids.size() < 2) throw ValidationError("path has fewer than 2 nodes");
  const int segs = path.segment_count();
  std::vector<double> breaks;
  breaks.reserve(segs + 1);
  breaks.push_back(0.0);
  for (int j = 0; j < segs; ++j) {
    const Vec3& a = graph.nodes[path.node_ids[j]];
    const Vec3& b = graph.nodes[path.node_ids[(j + 1) % path.node_ids.size()]];
    breaks.push_back(breaks.back() + (b - a).norm());
  }
  return breaks;
}

namespace {

struct BasisRow {
  int span = 0;
  double w[8] = {0};  // degree + 1 weights
};

std::vector<BasisRow> basis_rows(const std::vector<double>& knots, int degree,
                                 std::span<const double> params) {
  std::vector<BasisRow> rows(params.size());
  for (size_t i = 0; i < params.size(); ++i) {
    rows[i].span = find_span(knots, degree, params[i]);
    basis_functions(knots, degree, rows[i].span, params[i], rows[i].w);
  }
  return rows;
}

// Count parameters per span between consecutive breakpoints; the final span
// includes its right boundary.
std::vector<int> span_occupancy(const std::vector<double>& breaks,
                                std::span<const double> params) {
  std::vector<int> count(breaks.size() - 1, 0);
  for (double u : params) {
    const auto it = std::upper_bound(breaks.begin(), breaks.end(), u);
    int span = static_cast<int>(it - breaks.begin()) - 1;
    span = std::clamp(span, 0, static_cast<int>(count.size()) - 1);
    ++count[span];
  }
  return count;
}

// Remove the interior boundary next to the first empty span; returns false
// when every span is occupied.
bool merge_empty_span(std::vector<double>& breaks, std::span<const double> params) {
  const std::vector<int> occupancy = span_occupancy(breaks, params);
  for (size_t i = 0; i < occupancy.size(); ++i) {
    if (occupancy[i] > 0) continue;
    // Drop an interior boundary of this span: prefer the right one.
    const size_t right = i + 1;
    const size_t victim = right < breaks.size() - 1 ? right : i;
    if (victim == 0 || victim == breaks.size() - 1) continue;  // boundary fixed
    breaks.erase(breaks.begin() + victim);
    return true;
  }
  return false;
}

BSplineCurve straight_segment(const Vec3& start, const Vec3& end, double t0, double t1) {
  BSplineCurve curve;
  curve.degree = 1;
  curve.closed = false;
  curve.knots = {t0, t0, t1, t1};
  curve.control_points = {start, end};
  return curve;
}

SplineFitResult fit_open(std::span<const Vec3> points, std::span<const double> params,
                         std::span<const double> node_params, const Vec3& start,
                         const Vec3& end, int degree) {
  const double t0 = node_params.front();
  const double t1 = node_params.back();
  if (!(t1 > t0)) throw ValidationError("path has zero parameter span");

  std::vector<double> breaks;
  breaks.push_back(t0);
  for (size_t i = 1; i + 1 < node_params.size(); ++i) {
    if (node_params[i] > breaks.back() && node_params[i] < t1) {
      breaks.push_back(node_params[i]);
    }
  }
  breaks.push_back(t1);

  bool degraded = false;
  int deg = degree;
  while (true) {
    while (merge_empty_span(breaks, params)) {
    }
    const int interior = static_cast<int>(breaks.size()) - 2;
    const int n_ctrl = interior + deg + 1;
    const int n_free = n_ctrl - 2;

    if (static_cast<int>(points.size()) < n_free) {
      if (interior > 0) {
        // Keep every other interior knot; starting at the second guarantees
        // the count halves strictly, so a lone knot is dropped, not kept.
        std::vector<double> thinned;
        thinned.push_back(t0);
        for (int i = 2; i <= interior; i += 2) thinned.push_back(breaks[i]);
        thinned.push_back(t1);
        breaks = std::move(thinned);
        degraded = true;
        continue;
      }
      if (deg > 1) {
        --deg;
        degraded = true;
        continue;
      }
      return {straight_segment(start, end, t0, t1), true};
    }

    std::vector<double> knots;
    for (int i = 0; i <= deg; ++i) knots.push_back(t0);
    for (int i = 1; i <= interior; ++i) knots.push_back(breaks[i]);
    for (int i = 0; i <= deg; ++i) knots.push_back(t1);

    if (n_free == 0) {
      BSplineCurve curve;
      curve.degree = deg;
      curve.closed = false;
      curve.knots = std::move(knots);
      curve.control_points = {start, end};
      curve.validate();
      return {curve, degraded};
    }

    const std::vector<BasisRow> rows = basis_rows(knots, deg, params);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_free, n_free);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n_free, 3);
    for (size_t i = 0; i < params.size(); ++i) {
      const BasisRow& row = rows[i];
      const int j0 = row.span - deg;
      Vec3 target = points[i];
      for (int a = 0; a <= deg; ++a) {
        const int ja = j0 + a;
        if (ja == 0) target -= row.w[a] * start;
        if (ja == n_ctrl - 1) target -= row.w[a] * end;
      }
      for (int a = 0; a <= deg; ++a) {
        const int ja = j0 + a;
        if (ja <= 0 || ja >= n_ctrl - 1) continue;
        rhs.row(ja - 1) += row.w[a] * target.transpose();
        for (int b = 0; b <= deg; ++b) {
          const int jb = j0 + b;
          if (jb <= 0 || jb >= n_ctrl - 1) continue;
          m(ja - 1, jb - 1) += row.w[a] * row.w[b];
        }
      }
    }

    const Eigen::MatrixXd solved = m.ldlt().solve(rhs);
    if (!solved.allFinite()) {
      if (interior > 0) {
        std::vector<double> thinned;
        thinned.push_back(t0);
        for (int i = 2; i <= interior; i += 2) thinned.push_back(breaks[i]);
        thinned.push_back(t1);
        breaks = std::move(thinned);
        degraded = true;
        continue;
      }
      if (deg > 1) {
        --deg;
        degraded = true;
        continue;
      }
      return {straight_segment(start, end, t0, t1), true};
    }

    BSplineCurve curve;
    curve.degree = deg;
    curve.closed = false;
    curve.knots = std::move(knots);
    curve.control_points.push_back(start);
    for (int j = 0; j < n_free; ++j) {
      curve.control_points.push_back(Vec3(solved.row(j).transpose()));
    }
    curve.control_points.push_back(end);
    curve.validate();
    return {curve, degraded};
  }
}

SplineFitResult fit_closed(std::span<const Vec3> points, std::span<const double> params,
                           std::span<const double> node_params, int degree) {
  std::vector<double> breaks;
  breaks.push_back(node_params.front());
  for (size_t i = 1; i < node_params.size(); ++i) {
    if (node_params[i] > breaks.back()) breaks.push_back(node_params[i]);
  }
  if (breaks.size() < 3) throw ValidationError("closed path has zero length");
  const double period = breaks.back() - breaks.front();

  bool degraded = false;
  while (true) {
    while (merge_empty_span(breaks, params)) {
    }
    const int m = static_cast<int>(breaks.size()) - 1;
    if (m < 2) throw ValidationError("closed fit degenerated to a point");
    const int deg = std::min(degree, m - 1);
    if (deg < degree) degraded = true;

    if (static_cast<int>(points.size()) < m) {
      if (m > 2) {
        std::vector<double> thinned;
        thinned.push_back(breaks.front());
        for (int i = 1; i < m; i += 2) thinned.push_back(breaks[i]);
        thinned.push_back(breaks.back());
        breaks = std::move(thinned);
        degraded = true;
        continue;
      }
      throw ValidationError("closed fit has too few points");
    }

    std::vector<double> knots;
    for (int i = m - deg; i < m; ++i) knots.push_back(breaks[i] - period);
    for (int i = 0; i <= m; ++i) knots.push_back(breaks[i]);
    for (int i = 1; i <= deg; ++i) knots.push_back(breaks[i] + period);

    const std::vector<BasisRow> rows = basis_rows(knots, deg, params);
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, 3);
    for (size_t i = 0; i < params.size(); ++i) {
      const BasisRow& row = rows[i];
      const int j0 = row.span - deg;
      for (int a = 0; a <= deg; ++a) {
        const int ca = (j0 + a) % m;
        rhs.row(ca) += row.w[a] * points[i].transpose();
        for (int b = 0; b <= deg; ++b) {
          const int cb = (j0 + b) % m;
          mat(ca, cb) += row.w[a] * row.w[b];
        }
      }
    }

    const Eigen::MatrixXd solved = mat.ldlt().solve(rhs);
    if (!solved.allFinite()) {
      if (m > 2) {
        std::vector<double> thinned;
        thinned.push_back(breaks.front());
        for (int i = 1; i < m; i += 2) thinned.push_back(breaks[i]);
        thinned.push_back(breaks.back());
        breaks = std::move(thinned);
        degraded = true;
        continue;
      }
      throw ValidationError("closed fit is singular");
    }

    BSplineCurve curve;
    curve.degree = deg;
    curve.closed = true;
    curve.knots = std::move(knots);
    for (int j = 0; j < m; ++j) {
      curve.control_points.push_back(Vec3(solved.row(j).transpose()));
    }
    for (int j = 0; j < deg; ++j) curve.control_points.push_back(curve.control_points[j]);
    curve.validate();
    return {curve, degraded};
  }
}

}  // namespace

SplineFitResult fit_spline(std::span<const Vec3> points, std::span<const double> params,
                           std::span<const double> node_params, const Vec3& start,
                           const Vec3& end, bool closed, int degree) {
  if (points.size() != params.size()) {
    throw ValidationError("points and params differ in size");
  }
  if (points.empty()) throw ValidationError("spline fit needs points");
  if (degree < 1 || degree > 7) throw ValidationError("degree must lie in [1, 7]");
  if (node_params.size() < 2) throw ValidationError("need at least 2 node parameters");
  for (size_t i = 1; i < node_params.size(); ++i) {
    if (node_params[i] < node_params[i - 1]) {
      throw ValidationError("node parameters must be non-decreasing");
    }
  }
  return closed ? fit_closed(points, params, node_params, degree)
                : fit_open(points, params, node_params, start, end, degree);
}

ControlOptimizationResult optimize_control_points(const BSplineCurve& curve,
                                                  std::span<const Vec3> points,
                                                  std::span<const double> distances,
                                                  std::span<const double> params,
                                                  int max_iterations) {
  if (points.size() != distances.size() || points.size() != params.size()) {
    throw ValidationError("points, distances and params differ in size");
  }
  curve.validate();

  ControlOptimizationResult result;
  result.curve = curve;

  const int deg = curve.degree;
  const int n_ctrl = static_cast<int>(curve.control_points.size());
  const int m_base = curve.closed ? n_ctrl - deg : n_ctrl;

  // Column index per control, -1 for pinned (open curve ends).
  const auto column_of = [&](int ctrl) {
    if (curve.closed) return ctrl % m_base;
    if (ctrl == 0 || ctrl == n_ctrl - 1) return -1;
    return ctrl - 1;
  };
  const int n_free = curve.closed ? m_base : n_ctrl - 2;

  const std::vector<BasisRow> rows = basis_rows(curve.knots, deg, params);

  const auto eval_point = [&](const std::vector<Vec3>& ctrl, size_t i) {
    Vec3 p = Vec3::Zero();
    const int j0 = rows[i].span - deg;
    for (int a = 0; a <= deg; ++a) p += rows[i].w[a] * ctrl[j0 + a];
    return p;
  };
  const auto objective_of = [&](const std::vector<Vec3>& ctrl) {
    double sum = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
      const double r = (eval_point(ctrl, i) - points[i]).norm() - distances[i];
      sum += r * r;
    }
    return sum;
  };

  double objective = objective_of(result.curve.control_points);
  result.objective_history.push_back(objective);
  if (points.empty() || n_free <= 0 || max_iterations <= 0) return result;

  // The normal matrix only depends on the fixed parameters.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_free, n_free);
  Eigen::MatrixXd pinned_rhs = Eigen::MatrixXd::Zero(n_free, 3);
  for (size_t i = 0; i < points.size(); ++i) {
    const BasisRow& row = rows[i];
    const int j0 = row.span - deg;
    for (int a = 0; a <= deg; ++a) {
      const int ca = column_of(j0 + a);
      if (ca < 0) continue;
      for (int b = 0; b <= deg; ++b) {
        const int cb = column_of(j0 + b);
        if (cb >= 0) {
          m(ca, cb) += row.w[a] * row.w[b];
        } else {
          pinned_rhs.row(ca) +=
              row.w[a] * row.w[b] * curve.control_points[j0 + b].transpose();
        }
      }
    }
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(m);

  for (int iter = 0; iter < max_iterations; ++iter) {
    Eigen::MatrixXd rhs = -pinned_rhs;
    for (size_t i = 0; i < points.size(); ++i) {
      const Vec3 on_curve = eval_point(result.curve.control_points, i);
      const Vec3 dir = on_curve - points[i];
      const double dist = dir.norm();
      const Vec3 target =
          dist > 1e-12 ? Vec3(points[i] + distances[i] * dir / dist) : points[i];
      const BasisRow& row = rows[i];
      const int j0 = row.span - deg;
      for (int a = 0; a <= deg; ++a) {
        const int ca = column_of(j0 + a);
        if (ca >= 0) rhs.row(ca) += row.w[a] * target.transpose();
      }
    }

    const Eigen::MatrixXd solved = ldlt.solve(rhs);
    if (!solved.allFinite()) {
      result.curve = curve;
      result.degraded = true;
      result.objective_history.assign(1, result.objective_history.front());
      result.iterations = 0;
      return result;
    }

    const std::vector<Vec3> old_ctrl = result.curve.control_points;
    std::vector<Vec3> trial = old_ctrl;
    double scale = 1.0;
    bool accepted = false;
    double candidate = 0.0;
    for (int halving = 0; halving <= 12; ++halving) {
      for (int j = 0; j < n_free; ++j) {
        const int ctrl_index = curve.closed ? j : j + 1;
        const Vec3 proposed(solved.row(j).transpose());
        trial[ctrl_index] = old_ctrl[ctrl_index] +
                            scale * (proposed - old_ctrl[ctrl_index]);
      }
      if (curve.closed) {
        for (int j = 0; j < deg; ++j) trial[m_base + j] = trial[j];
      }
      candidate = objective_of(trial);
      if (candidate <= objective) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;

    double max_move = 0.0;
    for (int j = 0; j < n_ctrl; ++j) {
      max_move = std::max(max_move, (trial[j] - old_ctrl[j]).norm());
    }
    result.curve.control_points = trial;
    objective = candidate;
    result.objective_history.push_back(objective);
    result.iterations = iter + 1;
    if (max_move < 1e-12) break;
  }
  return result;
}

}  // namespace wirefit
