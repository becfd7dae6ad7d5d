#include "wirefit/point_cloud.hpp"

#include "wirefit/sampling.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wirefit {

namespace {
constexpr int kMinPoints = 4;

bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Splits on spaces/tabs; returns false if the field count is not 4.
bool parse_xyzd_line(std::string_view line, double out[4]) {
  int field = 0;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (field >= 4 || !parse_double(line.substr(i, j - i), out[field])) return false;
    ++field;
    i = j;
  }
  return field == 4;
}
}  // namespace

void PointCloudField::validate() const {
  if (points.empty()) throw ValidationError("point cloud is empty");
  if (points.size() != distances.size())
    throw ValidationError("point/distance array length mismatch");
  if (!(sampling_distance_r > 0.0))
    throw ValidationError("sampling distance r must be positive");
  for (std::size_t i = 0; i < distances.size(); ++i) {
    const double d = distances[i];
    if (!(d >= 0.0 && d <= 1.0))
      throw ValidationError("distance out of [0, 1] at point " + std::to_string(i));
  }
}

PointCloudField read_point_cloud(std::istream& in, const std::string& origin) {
  PointCloudField cloud;
  double header_r = 0.0;
  bool have_r = false;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    while (!view.empty() && (view.back() == '\r' || view.back() == ' ')) view.remove_suffix(1);
    if (view.empty()) continue;
    if (view.front() == '#') {
      const auto pos = view.find("r=");
      if (pos != std::string_view::npos) {
        double r = 0.0;
        auto rest = view.substr(pos + 2);
        while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
        if (parse_double(rest, r) && r > 0.0) {
          header_r = r;
          have_r = true;
        }
      }
      continue;
    }
    double f[4];
    if (!parse_xyzd_line(view, f))
      throw ParseError(origin + ": malformed XYZD line", line_no);
    if (!(f[3] >= 0.0 && f[3] <= 1.0))
      throw ValidationError(origin + ": distance " + std::to_string(f[3]) +
                            " outside [0, 1] on line " + std::to_string(line_no));
    cloud.points.emplace_back(f[0], f[1], f[2]);
    cloud.distances.push_back(f[3]);
  }

  if (cloud.points.size() < kMinPoints)
    throw ValidationError(origin + ": too small, need at least " + std::to_string(kMinPoints) +
                          " points, got " + std::to_string(cloud.points.size()));

  cloud.sampling_distance_r = have_r ? header_r : estimate_sampling_distance(cloud.points);
  cloud.validate();
  return cloud;
}

PointCloudField load_point_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open point cloud file: " + path);
  return read_point_cloud(in, path);
}

void write_point_cloud(const PointCloudField& cloud, std::ostream& out) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "# r=%.9g\n", cloud.sampling_distance_r);
  out << buf;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %.9g\n", p.x(), p.y(), p.z(),
                  cloud.distances[i]);
    out << buf;
  }
}

void save_point_cloud(const PointCloudField& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  write_point_cloud(cloud, out);
  if (!out) throw Error("write failed: " + path);
}

SharpSkeleton extract_skeleton(const PointCloudField& cloud, double t_dist) {
  if (!(t_dist > 0.0)) throw ValidationError("extract_skeleton: t_dist must be positive");
  SharpSkeleton skeleton;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (cloud.distances[i] <= t_dist) {
      skeleton.parent_indices.push_back(static_cast<int>(i));
      skeleton.positions.push_back(cloud.points[i]);
      skeleton.distances.push_back(cloud.distances[i]);
    }
  }
  if (skeleton.positions.empty())
    throw PipelineError(PipelineError::Fail::no_sharp_features,
                        "no sharp features: no point within t_dist=" + std::to_string(t_dist));
  return skeleton;
}

}  // namespace wirefit
