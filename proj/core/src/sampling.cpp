#include "wirefit/sampling.hpp"

#include "wirefit/kdtree.hpp"
#include "wirefit/parallel.hpp"

#include <limits>

namespace wirefit {

std::vector<int> farthest_point_sampling(std::span<const Vec3> positions, int count) {
  const int n = static_cast<int>(positions.size());
  if (count < 1 || count > n)
    throw ValidationError("farthest_point_sampling: count must be in [1, positions.size()]");

  std::vector<int> picked;
  picked.reserve(count);
  picked.push_back(0);

  std::vector<double> min_d2(n);
  for (int i = 0; i < n; ++i) min_d2[i] = (positions[i] - positions[0]).squaredNorm();

  while (static_cast<int>(picked.size()) < count) {
    int best = 0;
    double best_d2 = -1.0;
    for (int i = 0; i < n; ++i) {
      if (min_d2[i] > best_d2) {  // strict: lowest index wins ties
        best_d2 = min_d2[i];
        best = i;
      }
    }
    picked.push_back(best);
    for (int i = 0; i < n; ++i) {
      const double d2 = (positions[i] - positions[best]).squaredNorm();
      if (d2 < min_d2[i]) min_d2[i] = d2;
    }
  }
  return picked;
}

double estimate_sampling_distance(std::span<const Vec3> positions) {
  const int n = static_cast<int>(positions.size());
  if (n < 2) throw ValidationError("estimate_sampling_distance: need at least 2 points");
  KdTree tree(positions);
  std::vector<double> nn(n);
  parallel_for(n, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) nn[i] = tree.nearest(positions[i], i).second;
  });
  double sum = 0.0;
  for (double d : nn) sum += d;
  return sum / n;
}

}  // namespace wirefit
