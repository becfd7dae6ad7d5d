#pragma once

#include "wirefit/corners.hpp"
#include "wirefit/types.hpp"

#include <span>
#include <vector>

namespace wirefit {

/// One connected curve segment of the corner-free skeleton.
struct CurveCluster {
  std::vector<int> member_indices;  // skeleton indices, ascending
};

/// Skeleton indices not claimed by any corner cluster, ascending.
std::vector<int> remove_corner_points(const SharpSkeleton& skeleton,
                                      const std::vector<CornerCluster>& corners);

/// Adjacency lists: i ~ j iff 0 < |p_i - p_j| <= connect_radius.
/// Neighbor lists are ascending; coincident duplicate points are adjacent.
std::vector<std::vector<int>> build_proximity_graph(std::span<const Vec3> points,
                                                    double connect_radius);

/// Connected components of the adjacency structure with fewer than min_size
/// members dropped, ordered by smallest member index.
std::vector<std::vector<int>> connected_components(
    const std::vector<std::vector<int>>& adjacency, int min_size);

/// The composed stage: strips corner-cluster members, links what remains at
/// connect_radius, and returns per-component skeleton index lists. Components
/// below min_size are dropped; `discarded` (if non-null) receives their
/// skeleton indices, ascending.
std::vector<CurveCluster> segment_curves(const SharpSkeleton& skeleton,
                                         const std::vector<CornerCluster>& corners,
                                         double connect_radius, int min_size,
                                         std::vector<int>* discarded = nullptr);

}  // namespace wirefit
