#pragma once

#include "wirefit/types.hpp"

#include <iosfwd>
#include <string>

namespace wirefit {

/// Reads the XYZD text format: an optional `# r=<float>` header line, then
/// one `x y z d` line per point. When the header is absent, r is estimated
/// as the mean nearest-neighbor distance.
PointCloudField load_point_cloud(const std::string& path);
PointCloudField read_point_cloud(std::istream& in, const std::string& origin = "<stream>");

/// Writes XYZD with the `# r=` header at 9 significant digits.
void save_point_cloud(const PointCloudField& cloud, const std::string& path);
void write_point_cloud(const PointCloudField& cloud, std::ostream& out);

/// Selects the points with distance <= t_dist, preserving parent order.
/// Throws PipelineError{no_sharp_features} when the result is empty.
SharpSkeleton extract_skeleton(const PointCloudField& cloud, double t_dist);

}  // namespace wirefit
