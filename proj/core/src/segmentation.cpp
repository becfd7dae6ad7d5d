#include "wirefit/segmentation.hpp"

#include "wirefit/kdtree.hpp"
#include "wirefit/parallel.hpp"

#include <algorithm>

namespace wirefit {

std::vector<int> remove_corner_points(const SharpSkeleton& skeleton,
                                      const std::vector<CornerCluster>& corners) {
  std::vector<char> claimed(skeleton.size(), 0);
  for (const CornerCluster& cluster : corners) {
    for (int idx : cluster.member_indices) {
      if (idx < 0 || idx >= static_cast<int>(skeleton.size())) {
        throw ValidationError("corner cluster references an invalid skeleton index");
      }
      claimed[idx] = 1;
    }
  }
  std::vector<int> kept;
  kept.reserve(skeleton.size());
  for (size_t i = 0; i < skeleton.size(); ++i) {
    if (!claimed[i]) kept.push_back(static_cast<int>(i));
  }
  return kept;
}

std::vector<std::vector<int>> build_proximity_graph(std::span<const Vec3> points,
                                                    double connect_radius) {
  if (connect_radius <= 0.0) throw ValidationError("connect_radius must be positive");
  std::vector<std::vector<int>> adjacency(points.size());
  if (points.empty()) return adjacency;

  const KdTree tree(points);
  parallel_for(points.size(), [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      std::vector<int> hits = tree.radius_query(points[i], connect_radius);
      hits.erase(std::remove(hits.begin(), hits.end(), static_cast<int>(i)),
                 hits.end());
      adjacency[i] = std::move(hits);
    }
  });
  return adjacency;
}

std::vector<std::vector<int>> connected_components(
    const std::vector<std::vector<int>>& adjacency, int min_size) {
  std::vector<std::vector<int>> components;
  std::vector<char> visited(adjacency.size(), 0);
  std::vector<int> stack;
  for (size_t seed = 0; seed < adjacency.size(); ++seed) {
    if (visited[seed]) continue;
    std::vector<int> members;
    stack.assign(1, static_cast<int>(seed));
    visited[seed] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (int w : adjacency[v]) {
        if (!visited[w]) {
          visited[w] = 1;
          stack.push_back(w);
        }
      }
    }
    if (static_cast<int>(members.size()) >= min_size) {
      std::sort(members.begin(), members.end());
      components.push_back(std::move(members));
    }
  }
  return components;
}

std::vector<CurveCluster> segment_curves(const SharpSkeleton& skeleton,
                                         const std::vector<CornerCluster>& corners,
                                         double connect_radius, int min_size,
                                         std::vector<int>* discarded) {
  const std::vector<int> kept = remove_corner_points(skeleton, corners);
  std::vector<Vec3> positions(kept.size());
  for (size_t i = 0; i < kept.size(); ++i) positions[i] = skeleton.positions[kept[i]];

  const auto adjacency = build_proximity_graph(positions, connect_radius);
  const auto components = connected_components(adjacency, min_size);

  std::vector<char> in_component(kept.size(), 0);
  std::vector<CurveCluster> clusters;
  clusters.reserve(components.size());
  for (const std::vector<int>& comp : components) {
    CurveCluster cluster;
    cluster.member_indices.reserve(comp.size());
    for (int local : comp) {
      cluster.member_indices.push_back(kept[local]);
      in_component[local] = 1;
    }
    clusters.push_back(std::move(cluster));
  }
  if (discarded) {
    discarded->clear();
    for (size_t i = 0; i < kept.size(); ++i) {
      if (!in_component[i]) discarded->push_back(kept[i]);
    }
  }
  return clusters;
}

}  // namespace wirefit
