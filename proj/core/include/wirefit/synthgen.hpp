#pragma once

#include "wirefit/types.hpp"
#include "wirefit/wireframe.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace wirefit {

/// An exact sharp-feature curve of a synthetic shape.
struct PrimitiveCurve {
  enum class Kind { segment, arc, full_circle, bezier };

  Kind kind = Kind::segment;

  // segment
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();

  // arc / full_circle: circle of `radius` around `center` in the plane
  // spanned by (u_axis, normal x u_axis); arcs cover angle in
  // [angle_start, angle_end] with 0 < angle_end - angle_start < 2*pi.
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  Vec3 u_axis = Vec3::UnitX();
  double radius = 0.0;
  double angle_start = 0.0;
  double angle_end = 0.0;

  // bezier: cubic control polygon.
  std::array<Vec3, 4> bez{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};

  double distance_to(const Vec3& p) const;
  Vec3 point_at(double t) const;  // t in [0,1], arc-angle/bezier parameter
  bool is_closed() const { return kind == Kind::full_circle; }
};

/// A bounded surface patch points are sampled from.
struct SurfacePatch {
  enum class Kind { planar, cylinder };

  Kind kind = Kind::planar;

  // planar: orthonormal frame (origin, u, v); region is either the even-odd
  // interior of `polygon` or, when the polygon is empty, the disk around
  // disk_center; `holes` are circular cutouts.
  Vec3 origin = Vec3::Zero();
  Vec3 u = Vec3::UnitX();
  Vec3 v = Vec3::UnitY();
  std::vector<Vec2> polygon;
  Vec2 disk_center = Vec2::Zero();
  double disk_radius = 0.0;
  struct Hole {
    Vec2 center;
    double radius;
  };
  std::vector<Hole> holes;

  // cylinder: lateral surface around axis `w` through `center`; angles are
  // measured from `axis_u` and points lie at height in [h0, h1] along w.
  Vec3 center = Vec3::Zero();
  Vec3 w = Vec3::UnitZ();
  Vec3 axis_u = Vec3::UnitX();
  double radius = 0.0;
  double theta0 = 0.0;
  double theta1 = 0.0;
  double h0 = 0.0;
  double h1 = 0.0;

  double area() const;
};

/// A complete synthetic model: surfaces to sample, exact feature curves,
/// and the corner set where open curves meet.
struct SyntheticShape {
  std::string name;
  std::vector<Vec3> corners;
  std::vector<PrimitiveCurve> curves;
  std::vector<SurfacePatch> patches;

  /// Exact distance from p to the nearest feature curve.
  double exact_distance(const Vec3& p) const;

  /// Ground truth as a parametric wireframe. Segments and beziers convert
  /// exactly; arcs and circles become dense degree-1 polylines whose
  /// deviation from the true circle stays below ~1e-6.
  Wireframe truth_wireframe() const;
};

/// Preset catalogue; `shape_names()` lists valid arguments.
std::vector<std::string> shape_names();
SyntheticShape make_shape(const std::string& name);

/// Samples every patch on a jittered grid with one point per r^2 of area,
/// perturbs positions with isotropic Gaussian noise of the given sigma, and
/// stores the exact curve distance at the noisy position clipped to [0,1].
/// Deterministic in (shape, r, noise_sigma, seed) independent of threading.
PointCloudField sample_field(const SyntheticShape& shape, double r,
                             double noise_sigma, std::uint64_t seed);

}  // namespace wirefit
