#include "wirefit/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wirefit {

namespace {
constexpr int kLeafSize = 16;

double box_distance2(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double d = 0.0;
    if (p[a] < lo[a]) d = lo[a] - p[a];
    else if (p[a] > hi[a]) d = p[a] - hi[a];
    d2 += d * d;
  }
  return d2;
}
}  // namespace

KdTree::KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 8);
    root_ = build(0, static_cast<int>(points_.size()));
  }
}

int KdTree::build(int begin, int end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.box_min = Vec3::Constant(std::numeric_limits<double>::infinity());
  node.box_max = -node.box_min;
  for (int i = begin; i < end; ++i) {
    const Vec3& p = points_[order_[i]];
    node.box_min = node.box_min.cwiseMin(p);
    node.box_max = node.box_max.cwiseMax(p);
  }

  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back(node);

  if (end - begin > kLeafSize) {
    Vec3 extent = node.box_max - node.box_min;
    int axis = 0;
    extent.maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
    const double split = points_[order_[mid]][axis];
    // Degenerate spread along every axis: keep as a leaf.
    if (extent[axis] > 0.0) {
      const int left = build(begin, mid);
      const int right = build(mid, end);
      nodes_[index].axis = axis;
      nodes_[index].split = split;
      nodes_[index].left = left;
      nodes_[index].right = right;
    }
  }
  return index;
}

void KdTree::radius_search(int node_index, const Vec3& center, double r2, std::vector<int>& out) const {
  const Node& node = nodes_[node_index];
  if (box_distance2(center, node.box_min, node.box_max) > r2) return;
  if (node.left < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      if ((points_[idx] - center).squaredNorm() <= r2) out.push_back(idx);
    }
    return;
  }
  radius_search(node.left, center, r2, out);
  radius_search(node.right, center, r2, out);
}

std::vector<int> KdTree::radius_query(const Vec3& center, double radius) const {
  std::vector<int> out;
  if (root_ >= 0 && radius >= 0.0) radius_search(root_, center, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::nearest_search(int node_index, const Vec3& center, int exclude, int& best,
                            double& best_d2) const {
  const Node& node = nodes_[node_index];
  if (box_distance2(center, node.box_min, node.box_max) > best_d2) return;
  if (node.left < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      if (idx == exclude) continue;
      const double d2 = (points_[idx] - center).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
        best_d2 = d2;
        best = idx;
      }
    }
    return;
  }
  // Descend into the side containing the query first.
  const int near = center[node.axis] <= node.split ? node.left : node.right;
  const int far = near == node.left ? node.right : node.left;
  nearest_search(near, center, exclude, best, best_d2);
  nearest_search(far, center, exclude, best, best_d2);
}

std::pair<int, double> KdTree::nearest(const Vec3& center, int exclude) const {
  if (empty() || (points_.size() == 1 && exclude == 0))
    throw ValidationError("KdTree::nearest called on an effectively empty tree");
  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  nearest_search(root_, center, exclude, best, best_d2);
  return {best, std::sqrt(best_d2)};
}

std::vector<int> radius_query(std::span<const Vec3> positions, const Vec3& center, double radius) {
  if (radius <= 0.0) throw ValidationError("radius_query: radius must be positive");
  return KdTree(positions).radius_query(center, radius);
}

}  // namespace wirefit
