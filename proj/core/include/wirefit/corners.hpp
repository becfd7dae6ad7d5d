#pragma once

#include "wirefit/types.hpp"

#include <vector>

namespace wirefit {

/// PCA summary of one sampled skeleton neighborhood.
struct NeighborhoodLabel {
  int center_index = -1;            // skeleton index of the query center
  std::vector<int> member_indices;  // skeleton indices within r_corner, ascending
  Vec3 sigma = Vec3(0.0, 0.0, 1.0); // explained-variance ratios, ascending, sum 1
  bool is_corner = false;           // sigma[1] above t_variance with >= 3 members
};

/// Runs PCA over ball neighborhoods centered on a farthest-point subsample
/// (ceil(fps_ratio * n) centers, clamped to [1, n]). Neighborhoods whose
/// middle variance ratio exceeds t_variance are corner-like: variance spreads
/// over at least two directions instead of hugging a single curve tangent.
std::vector<NeighborhoodLabel> classify_neighborhoods(const SharpSkeleton& skeleton,
                                                      double r_corner,
                                                      double t_variance,
                                                      double fps_ratio);

/// Accumulates per-point cornerness votes. Within each neighborhood the
/// distance estimates are rescaled to [0, 1]; corner-like neighborhoods add
/// 1 - phi (points closest to the feature vote strongest) while curve-like
/// neighborhoods subtract phi. A constant-distance neighborhood uses phi = 0.
std::vector<double> cornerness_weights(const SharpSkeleton& skeleton,
                                       const std::vector<NeighborhoodLabel>& labels);

/// A cluster of high-cornerness skeleton points.
struct CornerCluster {
  std::vector<int> member_indices;  // skeleton indices, ascending
  Vec3 bbox_min = Vec3::Zero();
  Vec3 bbox_max = Vec3::Zero();
  Vec3 center = Vec3::Zero();       // centroid of the seed candidates
};

/// Groups points with weight strictly above t_corner by single linkage at
/// merge_radius, then expands each cluster to every skeleton point inside the
/// candidate bounding box so the whole corner blob is claimed. Clusters are
/// ordered by their smallest member index.
std::vector<CornerCluster> detect_corner_clusters(const SharpSkeleton& skeleton,
                                                  const std::vector<double>& weights,
                                                  double t_corner,
                                                  double merge_radius);

}  // namespace wirefit
