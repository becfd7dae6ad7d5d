#pragma once

#include "wirefit/types.hpp"

#include <span>
#include <utility>
#include <vector>

namespace wirefit {

/// Static kd-tree over a fixed set of 3D points. Built once, then queried
/// concurrently without locking (no mutable state in queries).
class KdTree {
public:
  KdTree() = default;
  explicit KdTree(std::span<const Vec3> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Indices of all points with ||p - center|| <= radius, sorted ascending.
  std::vector<int> radius_query(const Vec3& center, double radius) const;

  /// Index and distance of the nearest point; `exclude` skips one index
  /// (useful for nearest-neighbor-of-a-member queries). Tree must be nonempty.
  std::pair<int, double> nearest(const Vec3& center, int exclude = -1) const;

  double nearest_distance(const Vec3& center) const { return nearest(center).second; }

private:
  struct Node {
    int left = -1;
    int right = -1;
    int begin = 0;
    int end = 0;   // leaf range in order_
    int axis = 0;
    double split = 0.0;
    Vec3 box_min, box_max;
  };

  int build(int begin, int end);
  void radius_search(int node, const Vec3& center, double r2, std::vector<int>& out) const;
  void nearest_search(int node, const Vec3& center, int exclude, int& best, double& best_d2) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// One-shot convenience wrapper: builds a temporary index.
std::vector<int> radius_query(std::span<const Vec3> positions, const Vec3& center, double radius);

}  // namespace wirefit
