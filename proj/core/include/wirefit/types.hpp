#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace wirefit {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file (bad token, wrong field count, ...).
class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line = -1)
      : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

/// A value or argument violates a documented precondition.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Shape-level pipeline failure; counted toward the fail rate.
class PipelineError : public Error {
public:
  enum class Fail { no_sharp_features, no_curves };

  PipelineError(Fail fail, const std::string& msg) : Error(msg), fail_(fail) {}
  Fail fail() const { return fail_; }

private:
  Fail fail_;
};

/// Dense point cloud with per-point distance-to-feature estimates in [0, 1].
/// Positions are assumed pre-normalized to roughly unit scale.
struct PointCloudField {
  std::vector<Vec3> points;
  std::vector<double> distances;
  double sampling_distance_r = 0.0;  // average nearest-neighbor spacing

  std::size_t size() const { return points.size(); }

  /// Throws ValidationError if any invariant is broken.
  void validate() const;
};

/// Subset of a PointCloudField within the sharpness threshold, with the
/// mapping back to the parent cloud. parent_indices is strictly increasing.
struct SharpSkeleton {
  std::vector<int> parent_indices;
  std::vector<Vec3> positions;
  std::vector<double> distances;

  std::size_t size() const { return positions.size(); }
};

}  // namespace wirefit
