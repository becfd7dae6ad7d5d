#include "wirefit/corners.hpp"

#include "wirefit/kdtree.hpp"
#include "wirefit/parallel.hpp"
#include "wirefit/sampling.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wirefit {

std::vector<NeighborhoodLabel> classify_neighborhoods(const SharpSkeleton& skeleton,
                                                      double r_corner,
                                                      double t_variance,
                                                      double fps_ratio) {
  if (r_corner <= 0.0) throw ValidationError("r_corner must be positive");
  if (fps_ratio <= 0.0 || fps_ratio > 1.0) {
    throw ValidationError("fps_ratio must lie in (0, 1]");
  }
  const int n = static_cast<int>(skeleton.size());
  if (n == 0) throw ValidationError("skeleton is empty");

  const int center_count =
      std::clamp(static_cast<int>(std::ceil(fps_ratio * n)), 1, n);
  std::vector<int> centers;
  if (center_count == n) {
    // Full coverage: every point is a center, no need to rank them.
    centers.resize(n);
    std::iota(centers.begin(), centers.end(), 0);
  } else {
    centers = farthest_point_sampling(skeleton.positions, center_count);
  }
  const KdTree tree(skeleton.positions);

  std::vector<NeighborhoodLabel> labels(centers.size());
  parallel_for(centers.size(), [&](size_t begin, size_t end) {
    for (size_t k = begin; k < end; ++k) {
      NeighborhoodLabel& label = labels[k];
      label.center_index = centers[k];
      label.member_indices =
          tree.radius_query(skeleton.positions[centers[k]], r_corner);

      const size_t m = label.member_indices.size();
      if (m < 3) {
        label.sigma = Vec3(0.0, 0.0, 1.0);
        label.is_corner = false;
        continue;
      }

      Vec3 mean = Vec3::Zero();
      for (int idx : label.member_indices) mean += skeleton.positions[idx];
      mean /= static_cast<double>(m);

      Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
      for (int idx : label.member_indices) {
        const Vec3 d = skeleton.positions[idx] - mean;
        cov += d * d.transpose();
      }
      cov /= static_cast<double>(m);

      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
      Vec3 lambda = solver.eigenvalues().cwiseMax(0.0);  // ascending
      const double total = lambda.sum();
      label.sigma = total > 0.0 ? Vec3(lambda / total) : Vec3(0.0, 0.0, 1.0);
      label.is_corner = label.sigma[1] > t_variance;
    }
  });
  return labels;
}

std::vector<double> cornerness_weights(const SharpSkeleton& skeleton,
                                       const std::vector<NeighborhoodLabel>& labels) {
  std::vector<double> weights(skeleton.size(), 0.0);
  for (const NeighborhoodLabel& label : labels) {
    if (label.member_indices.empty()) continue;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int idx : label.member_indices) {
      lo = std::min(lo, skeleton.distances[idx]);
      hi = std::max(hi, skeleton.distances[idx]);
    }
    const double range = hi - lo;
    for (int idx : label.member_indices) {
      const double phi = range > 0.0 ? (skeleton.distances[idx] - lo) / range : 0.0;
      weights[idx] += label.is_corner ? 1.0 - phi : -phi;
    }
  }
  return weights;
}

std::vector<CornerCluster> detect_corner_clusters(const SharpSkeleton& skeleton,
                                                  const std::vector<double>& weights,
                                                  double t_corner,
                                                  double merge_radius) {
  if (weights.size() != skeleton.size()) {
    throw ValidationError("weights do not match skeleton size");
  }
  if (merge_radius <= 0.0) throw ValidationError("merge_radius must be positive");

  std::vector<int> candidates;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > t_corner) candidates.push_back(static_cast<int>(i));
  }
  if (candidates.empty()) return {};

  std::vector<Vec3> cand_pos(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    cand_pos[i] = skeleton.positions[candidates[i]];
  }

  // Single linkage via union-find over the candidate set.
  std::vector<int> parent(candidates.size());
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&parent](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  const KdTree tree(cand_pos);
  for (size_t i = 0; i < candidates.size(); ++i) {
    for (int j : tree.radius_query(cand_pos[i], merge_radius)) {
      const int a = find(static_cast<int>(i));
      const int b = find(j);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }

  // Bucket candidates by root, ordered by smallest member.
  std::vector<std::vector<int>> groups;  // skeleton indices
  std::vector<int> root_to_group(candidates.size(), -1);
  for (size_t i = 0; i < candidates.size(); ++i) {
    const int root = find(static_cast<int>(i));
    if (root_to_group[root] < 0) {
      root_to_group[root] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[root_to_group[root]].push_back(candidates[i]);
  }

  const KdTree skel_tree(skeleton.positions);
  std::vector<CornerCluster> clusters;
  clusters.reserve(groups.size());
  for (std::vector<int>& group : groups) {
    CornerCluster cluster;
    Vec3 lo = skeleton.positions[group[0]];
    Vec3 hi = lo;
    for (int idx : group) {
      lo = lo.cwiseMin(skeleton.positions[idx]);
      hi = hi.cwiseMax(skeleton.positions[idx]);
    }
    cluster.bbox_min = lo;
    cluster.bbox_max = hi;

    // Centroid of the candidates; the bbox expansion below claims neighbors
    // along every incident edge, which would drag the centroid off-corner.
    Vec3 sum = Vec3::Zero();
    for (int idx : group) sum += skeleton.positions[idx];
    cluster.center = sum / static_cast<double>(group.size());

    // Claim every skeleton point inside the candidate bounding box.
    const Vec3 center = 0.5 * (lo + hi);
    const double radius = 0.5 * (hi - lo).norm() + 1e-12;
    for (int idx : skel_tree.radius_query(center, radius)) {
      const Vec3& p = skeleton.positions[idx];
      if ((p.array() >= lo.array()).all() && (p.array() <= hi.array()).all()) {
        cluster.member_indices.push_back(idx);
      }
    }
    std::sort(cluster.member_indices.begin(), cluster.member_indices.end());
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

}  // namespace wirefit
