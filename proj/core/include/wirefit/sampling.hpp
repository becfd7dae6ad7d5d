#pragma once

#include "wirefit/types.hpp"

#include <span>
#include <vector>

namespace wirefit {

/// Greedy farthest point sampling. Deterministic: the seed is index 0 and
/// ties are broken toward the lowest index. Returns `count` indices; each
/// pick maximizes the minimum distance to the already-picked set.
std::vector<int> farthest_point_sampling(std::span<const Vec3> positions, int count);

/// Mean nearest-neighbor distance over all points (the estimate used for the
/// sampling distance r when the input does not carry one).
double estimate_sampling_distance(std::span<const Vec3> positions);

}  // namespace wirefit
