#include "wirefit/synthgen.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wirefit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// --- deterministic hash RNG -------------------------------------------------
// Each grid cell draws from its own splitmix64 stream, so the generated cloud
// is a pure function of (shape, r, sigma, seed) regardless of iteration or
// thread order.

struct SplitMix {
  std::uint64_t s;

  explicit SplitMix(std::uint64_t seed) : s(seed) {}

  std::uint64_t next() {
    s += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  double uniform() {  // [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform_pos() {  // (0, 1]
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  // Box-Muller pair.
  void normal2(double& n0, double& n1) {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double m = std::sqrt(-2.0 * std::log(u1));
    n0 = m * std::cos(kTwoPi * u2);
    n1 = m * std::sin(kTwoPi * u2);
  }
};

std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
  SplitMix s(a ^ (b * 0xD1B54A32D192ED03ull + 0x2545F4914F6CDD1Dull));
  return s.next();
}

// --- closed-form curve distances ---------------------------------------------

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Distance to the full circle of `radius` around `center` with unit normal w.
double circle_distance(const Vec3& p, const Vec3& center, const Vec3& w, double radius) {
  const Vec3 d = p - center;
  const double h = d.dot(w);
  const Vec3 q = d - h * w;
  const double rho = q.norm();
  const double dr = rho - radius;
  return std::sqrt(dr * dr + h * h);
}

// --- cubic bezier closest distance -------------------------------------------
// The squared distance to a cubic is a degree-6 polynomial; its stationary
// points are roots of a quintic found via the companion matrix, then polished
// with Newton steps. Evaluated against both endpoints this is exact to
// machine precision.

Vec3 bezier_point(const std::array<Vec3, 4>& b, double t) {
  const double s = 1.0 - t;
  return s * s * s * b[0] + 3.0 * s * s * t * b[1] + 3.0 * s * t * t * b[2] +
         t * t * t * b[3];
}

Vec3 bezier_derivative(const std::array<Vec3, 4>& b, double t) {
  const double s = 1.0 - t;
  return 3.0 * s * s * (b[1] - b[0]) + 6.0 * s * t * (b[2] - b[1]) +
         3.0 * t * t * (b[3] - b[2]);
}

double bezier_distance(const Vec3& p, const std::array<Vec3, 4>& b) {
  // Power-basis coefficients of B(t) - p and B'(t).
  const Vec3 d0 = b[0] - p;
  const Vec3 d1 = 3.0 * (b[1] - b[0]);
  const Vec3 d2 = 3.0 * (b[2] - 2.0 * b[1] + b[0]);
  const Vec3 d3 = b[3] - 3.0 * b[2] + 3.0 * b[1] - b[0];
  const Vec3 e0 = d1;
  const Vec3 e1 = 2.0 * d2;
  const Vec3 e2 = 3.0 * d3;

  // (B(t) - p) . B'(t), ascending coefficients.
  double q[6];
  q[0] = d0.dot(e0);
  q[1] = d0.dot(e1) + d1.dot(e0);
  q[2] = d0.dot(e2) + d1.dot(e1) + d2.dot(e0);
  q[3] = d1.dot(e2) + d2.dot(e1) + d3.dot(e0);
  q[4] = d2.dot(e2) + d3.dot(e1);
  q[5] = d3.dot(e2);

  double best = std::min((p - b[0]).norm(), (p - b[3]).norm());

  int deg = 5;
  double scale = 0.0;
  for (double c : q) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return best;
  while (deg > 0 && std::abs(q[deg]) <= 1e-14 * scale) --deg;
  if (deg == 0) return best;

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -q[i] / q[deg];
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;

  const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
  for (int i = 0; i < deg; ++i) {
    const std::complex<double> root = solver.eigenvalues()[i];
    if (std::abs(root.imag()) > 1e-8) continue;
    double t = std::clamp(root.real(), 0.0, 1.0);
    // Newton polish on f'(t)/2 = (B(t)-p).B'(t).
    for (int it = 0; it < 3; ++it) {
      const Vec3 diff = bezier_point(b, t) - p;
      const Vec3 der = bezier_derivative(b, t);
      const Vec3 der2 = 6.0 * (1.0 - t) * (b[2] - 2.0 * b[1] + b[0]) +
                        6.0 * t * (b[3] - 2.0 * b[2] + b[1]);
      const double g = diff.dot(der);
      const double gp = der.squaredNorm() + diff.dot(der2);
      if (std::abs(gp) < 1e-30) break;
      const double tn = std::clamp(t - g / gp, 0.0, 1.0);
      if (std::abs(tn - t) < 1e-16) {
        t = tn;
        break;
      }
      t = tn;
    }
    best = std::min(best, (p - bezier_point(b, t)).norm());
  }
  return best;
}

// --- polygon utilities --------------------------------------------------------

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& q) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& pi = poly[i];
    const Vec2& pj = poly[j];
    if ((pi.y() > q.y()) != (pj.y() > q.y()) &&
        q.x() < (pj.x() - pi.x()) * (q.y() - pi.y()) / (pj.y() - pi.y()) + pi.x()) {
      inside = !inside;
    }
  }
  return inside;
}

double polygon_area(const std::vector<Vec2>& poly) {
  double twice = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    twice += poly[j].x() * poly[i].y() - poly[i].x() * poly[j].y();
  }
  return std::abs(twice) * 0.5;
}

}  // namespace

// --- PrimitiveCurve ------------------------------------------------------------

double PrimitiveCurve::distance_to(const Vec3& p) const {
  switch (kind) {
    case Kind::segment:
      return segment_distance(p, a, b);
    case Kind::full_circle:
      return circle_distance(p, center, normal, radius);
    case Kind::arc: {
      const Vec3 d = p - center;
      const double h = d.dot(normal);
      const Vec3 q = d - h * normal;
      const Vec3 v_axis = normal.cross(u_axis);
      double theta = std::atan2(q.dot(v_axis), q.dot(u_axis));
      double rel = theta - angle_start;
      rel -= kTwoPi * std::floor(rel / kTwoPi);  // [0, 2*pi)
      if (q.norm() > 0.0 && rel <= angle_end - angle_start) {
        const double dr = q.norm() - radius;
        return std::sqrt(dr * dr + h * h);
      }
      return std::min((p - point_at(0.0)).norm(), (p - point_at(1.0)).norm());
    }
    case Kind::bezier:
      return bezier_distance(p, bez);
  }
  throw Error("invalid primitive curve kind");
}

Vec3 PrimitiveCurve::point_at(double t) const {
  switch (kind) {
    case Kind::segment:
      return a + t * (b - a);
    case Kind::full_circle: {
      const double theta = t * kTwoPi;
      const Vec3 v_axis = normal.cross(u_axis);
      return center + radius * (std::cos(theta) * u_axis + std::sin(theta) * v_axis);
    }
    case Kind::arc: {
      const double theta = angle_start + t * (angle_end - angle_start);
      const Vec3 v_axis = normal.cross(u_axis);
      return center + radius * (std::cos(theta) * u_axis + std::sin(theta) * v_axis);
    }
    case Kind::bezier:
      return bezier_point(bez, t);
  }
  throw Error("invalid primitive curve kind");
}

// --- SurfacePatch ----------------------------------------------------------------

double SurfacePatch::area() const {
  if (kind == Kind::cylinder) return (theta1 - theta0) * radius * (h1 - h0);
  double base = polygon.empty() ? std::numbers::pi * disk_radius * disk_radius
                                : polygon_area(polygon);
  for (const Hole& h : holes) base -= std::numbers::pi * h.radius * h.radius;
  return base;
}

// --- SyntheticShape -----------------------------------------------------------------

double SyntheticShape::exact_distance(const Vec3& p) const {
  if (curves.empty()) throw ValidationError("shape has no feature curves");
  double best = std::numeric_limits<double>::infinity();
  for (const PrimitiveCurve& c : curves) best = std::min(best, c.distance_to(p));
  return best;
}

namespace {

BSplineCurve segment_curve(const Vec3& a, const Vec3& b) {
  BSplineCurve c;
  c.degree = 1;
  c.closed = false;
  const double len = (b - a).norm();
  c.knots = {0.0, 0.0, len, len};
  c.control_points = {a, b};
  return c;
}

// Dense degree-1 approximation of a circular arc (angles in [t0, t1]).
BSplineCurve arc_polyline(const PrimitiveCurve& prim, bool closed) {
  const double span = closed ? kTwoPi : prim.angle_end - prim.angle_start;
  // Chord count keeping the sagitta below ~1e-7.
  const double per_chord = std::sqrt(8.0 * 1e-7 / std::max(prim.radius, 1e-9));
  const int n = std::clamp(static_cast<int>(std::ceil(span / per_chord)), 16, 8192);

  std::vector<Vec3> nodes;
  nodes.reserve(n + 1);
  for (int i = 0; i <= (closed ? n - 1 : n); ++i) {
    nodes.push_back(prim.point_at(static_cast<double>(i) / n));
  }

  BSplineCurve c;
  c.degree = 1;
  c.closed = closed;
  if (!closed) {
    c.control_points = nodes;
    c.knots.push_back(0.0);
    double s = 0.0;
    c.knots.push_back(s);
    for (size_t i = 1; i < nodes.size(); ++i) {
      s += (nodes[i] - nodes[i - 1]).norm();
      c.knots.push_back(s);
    }
    c.knots.push_back(s);
  } else {
    const int m = static_cast<int>(nodes.size());
    std::vector<double> breaks(m + 1, 0.0);
    for (int i = 1; i <= m; ++i) {
      breaks[i] = breaks[i - 1] + (nodes[i % m] - nodes[i - 1]).norm();
    }
    const double period = breaks[m];
    c.knots.push_back(breaks[m - 1] - period);
    for (int i = 0; i <= m; ++i) c.knots.push_back(breaks[i]);
    c.knots.push_back(breaks[1] + period);
    c.control_points = nodes;
    c.control_points.push_back(nodes[0]);
  }
  return c;
}

BSplineCurve bezier_curve(const std::array<Vec3, 4>& b) {
  BSplineCurve c;
  c.degree = 3;
  c.closed = false;
  c.knots = {0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0};
  c.control_points.assign(b.begin(), b.end());
  return c;
}

}  // namespace

Wireframe SyntheticShape::truth_wireframe() const {
  Wireframe wf;
  wf.corners = corners;
  for (const PrimitiveCurve& prim : curves) {
    switch (prim.kind) {
      case PrimitiveCurve::Kind::segment:
        wf.curves.push_back(segment_curve(prim.a, prim.b));
        break;
      case PrimitiveCurve::Kind::full_circle:
        wf.curves.push_back(arc_polyline(prim, true));
        break;
      case PrimitiveCurve::Kind::arc:
        wf.curves.push_back(arc_polyline(prim, false));
        break;
      case PrimitiveCurve::Kind::bezier:
        wf.curves.push_back(bezier_curve(prim.bez));
        break;
    }
  }
  wf.validate();
  return wf;
}

// --- preset construction ---------------------------------------------------------

namespace {

SurfacePatch planar_from_loop(const std::vector<Vec3>& loop) {
  SurfacePatch patch;
  patch.kind = SurfacePatch::Kind::planar;
  patch.origin = loop[0];
  patch.u = (loop[1] - loop[0]).normalized();
  Vec3 n = Vec3::Zero();
  for (size_t i = 2; i < loop.size(); ++i) {
    n = (loop[1] - loop[0]).cross(loop[i] - loop[0]);
    if (n.norm() > 1e-12) break;
  }
  n.normalize();
  patch.v = n.cross(patch.u);
  for (const Vec3& p : loop) {
    patch.polygon.emplace_back((p - patch.origin).dot(patch.u),
                               (p - patch.origin).dot(patch.v));
  }
  return patch;
}

SurfacePatch planar_rect_patch(const Vec3& origin, const Vec3& u, const Vec3& v,
                               double width, double height) {
  SurfacePatch patch;
  patch.kind = SurfacePatch::Kind::planar;
  patch.origin = origin;
  patch.u = u;
  patch.v = v;
  patch.polygon = {Vec2(0.0, 0.0), Vec2(width, 0.0), Vec2(width, height),
                   Vec2(0.0, height)};
  return patch;
}

PrimitiveCurve segment_prim(const Vec3& a, const Vec3& b) {
  PrimitiveCurve c;
  c.kind = PrimitiveCurve::Kind::segment;
  c.a = a;
  c.b = b;
  return c;
}

PrimitiveCurve circle_prim(const Vec3& center, const Vec3& normal, double radius) {
  PrimitiveCurve c;
  c.kind = PrimitiveCurve::Kind::full_circle;
  c.center = center;
  c.normal = normal;
  c.u_axis = std::abs(normal.z()) < 0.9 ? Vec3(Vec3::UnitZ().cross(normal)).normalized()
                                        : Vec3::UnitX();
  c.radius = radius;
  c.angle_start = 0.0;
  c.angle_end = kTwoPi;
  return c;
}

// Right prism over a simple polygon: two caps plus one rectangle per side,
// with every cap edge and vertical edge a sharp segment.
SyntheticShape extruded_prism(const std::string& name, const std::vector<Vec2>& poly,
                              double z0, double z1) {
  SyntheticShape shape;
  shape.name = name;
  const size_t n = poly.size();

  std::vector<Vec3> bottom(n), top(n);
  for (size_t i = 0; i < n; ++i) {
    bottom[i] = Vec3(poly[i].x(), poly[i].y(), z0);
    top[i] = Vec3(poly[i].x(), poly[i].y(), z1);
  }
  shape.corners = bottom;
  shape.corners.insert(shape.corners.end(), top.begin(), top.end());

  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    shape.curves.push_back(segment_prim(bottom[i], bottom[j]));
  }
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    shape.curves.push_back(segment_prim(top[i], top[j]));
  }
  for (size_t i = 0; i < n; ++i) {
    shape.curves.push_back(segment_prim(bottom[i], top[i]));
  }

  shape.patches.push_back(planar_from_loop(bottom));
  shape.patches.push_back(planar_from_loop(top));
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    const Vec3 u = (bottom[j] - bottom[i]).normalized();
    shape.patches.push_back(planar_rect_patch(bottom[i], u, Vec3::UnitZ(),
                                              (bottom[j] - bottom[i]).norm(), z1 - z0));
  }
  return shape;
}

std::vector<Vec2> regular_polygon(const Vec2& center, double radius, int sides) {
  std::vector<Vec2> poly;
  for (int i = 0; i < sides; ++i) {
    const double t = kTwoPi * i / sides;
    poly.emplace_back(center.x() + radius * std::cos(t),
                      center.y() + radius * std::sin(t));
  }
  return poly;
}

SyntheticShape make_cube() {
  return extruded_prism(
      "cube", {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}, 0.0, 1.0);
}

SyntheticShape make_wedge() {
  // Near-equilateral footprint: corner angles stay wide enough for the PCA
  // detector, whose response collapses below ~60 degrees.
  return extruded_prism(
      "wedge", {Vec2(0.15, 0.2), Vec2(0.85, 0.2), Vec2(0.5, 0.8)}, 0.2, 0.8);
}

SyntheticShape make_l_bracket() {
  return extruded_prism("l-bracket",
                        {Vec2(0.15, 0.15), Vec2(0.85, 0.15), Vec2(0.85, 0.45),
                         Vec2(0.45, 0.45), Vec2(0.45, 0.85), Vec2(0.15, 0.85)},
                        0.2, 0.6);
}

SyntheticShape make_prism() {
  return extruded_prism("fillet-free-prism", regular_polygon(Vec2(0.5, 0.5), 0.35, 6),
                        0.25, 0.75);
}

SyntheticShape make_gable() {
  return extruded_prism("gable-block",
                        {Vec2(0.15, 0.15), Vec2(0.85, 0.15), Vec2(0.85, 0.55),
                         Vec2(0.5, 0.8), Vec2(0.15, 0.55)},
                        0.25, 0.75);
}

SyntheticShape make_notched() {
  return extruded_prism("notched-plate",
                        {Vec2(0.15, 0.15), Vec2(0.85, 0.15), Vec2(0.85, 0.85),
                         Vec2(0.6, 0.85), Vec2(0.6, 0.6), Vec2(0.4, 0.6),
                         Vec2(0.4, 0.85), Vec2(0.15, 0.85)},
                        0.3, 0.55);
}

SyntheticShape make_pyramid() {
  SyntheticShape shape;
  shape.name = "pyramid";
  const double z0 = 0.2;
  const Vec3 apex(0.5, 0.5, 0.8);
  const std::vector<Vec3> base = {Vec3(0.15, 0.15, z0), Vec3(0.85, 0.15, z0),
                                  Vec3(0.85, 0.85, z0), Vec3(0.15, 0.85, z0)};
  shape.corners = base;
  shape.corners.push_back(apex);
  for (int i = 0; i < 4; ++i) {
    shape.curves.push_back(segment_prim(base[i], base[(i + 1) % 4]));
  }
  for (int i = 0; i < 4; ++i) shape.curves.push_back(segment_prim(base[i], apex));
  shape.patches.push_back(planar_from_loop(base));
  for (int i = 0; i < 4; ++i) {
    shape.patches.push_back(planar_from_loop({base[i], base[(i + 1) % 4], apex}));
  }
  return shape;
}

SyntheticShape make_cylinder() {
  SyntheticShape shape;
  shape.name = "cylinder";
  const Vec3 axis_center(0.5, 0.5, 0.0);
  const double radius = 0.3;
  const double z0 = 0.25, z1 = 0.75;

  shape.curves.push_back(circle_prim(Vec3(0.5, 0.5, z0), Vec3::UnitZ(), radius));
  shape.curves.push_back(circle_prim(Vec3(0.5, 0.5, z1), Vec3::UnitZ(), radius));

  SurfacePatch side;
  side.kind = SurfacePatch::Kind::cylinder;
  side.center = axis_center;
  side.w = Vec3::UnitZ();
  side.axis_u = Vec3::UnitX();
  side.radius = radius;
  side.theta0 = 0.0;
  side.theta1 = kTwoPi;
  side.h0 = z0;
  side.h1 = z1;
  shape.patches.push_back(side);

  for (double z : {z0, z1}) {
    SurfacePatch cap;
    cap.kind = SurfacePatch::Kind::planar;
    cap.origin = Vec3(0.0, 0.0, z);
    cap.u = Vec3::UnitX();
    cap.v = Vec3::UnitY();
    cap.disk_center = Vec2(0.5, 0.5);
    cap.disk_radius = radius;
    shape.patches.push_back(cap);
  }
  return shape;
}

SyntheticShape make_closed_ring() {
  SyntheticShape shape;
  shape.name = "closed-ring";
  shape.curves.push_back(circle_prim(Vec3(0.5, 0.5, 0.5), Vec3::UnitZ(), 0.3));
  shape.patches.push_back(planar_rect_patch(Vec3(0.08, 0.08, 0.5), Vec3::UnitX(),
                                            Vec3::UnitY(), 0.84, 0.84));
  return shape;
}

SyntheticShape make_boss() {
  SyntheticShape shape = extruded_prism(
      "box-with-cylindrical-boss",
      {Vec2(0.15, 0.15), Vec2(0.85, 0.15), Vec2(0.85, 0.85), Vec2(0.15, 0.85)}, 0.1,
      0.5);
  shape.name = "box-with-cylindrical-boss";
  const double boss_r = 0.18;
  const double z_top_box = 0.5, z_top_boss = 0.72;

  shape.curves.push_back(circle_prim(Vec3(0.5, 0.5, z_top_box), Vec3::UnitZ(), boss_r));
  shape.curves.push_back(circle_prim(Vec3(0.5, 0.5, z_top_boss), Vec3::UnitZ(), boss_r));

  // The box top cap (patch index 1) gains a circular cutout under the boss.
  shape.patches[1].holes.push_back({Vec2(0.5, 0.5), boss_r});

  SurfacePatch side;
  side.kind = SurfacePatch::Kind::cylinder;
  side.center = Vec3(0.5, 0.5, 0.0);
  side.w = Vec3::UnitZ();
  side.axis_u = Vec3::UnitX();
  side.radius = boss_r;
  side.theta0 = 0.0;
  side.theta1 = kTwoPi;
  side.h0 = z_top_box;
  side.h1 = z_top_boss;
  shape.patches.push_back(side);

  SurfacePatch cap;
  cap.kind = SurfacePatch::Kind::planar;
  cap.origin = Vec3(0.0, 0.0, z_top_boss);
  cap.u = Vec3::UnitX();
  cap.v = Vec3::UnitY();
  cap.disk_center = Vec2(0.5, 0.5);
  cap.disk_radius = boss_r;
  shape.patches.push_back(cap);
  return shape;
}

SyntheticShape make_bezier_plate() {
  SyntheticShape shape;
  shape.name = "bezier-ridge-plate";
  PrimitiveCurve ridge;
  ridge.kind = PrimitiveCurve::Kind::bezier;
  ridge.bez = {Vec3(0.15, 0.5, 0.5), Vec3(0.35, 0.72, 0.5), Vec3(0.65, 0.28, 0.5),
               Vec3(0.85, 0.5, 0.5)};
  shape.curves.push_back(ridge);
  shape.corners = {ridge.bez[0], ridge.bez[3]};
  shape.patches.push_back(planar_rect_patch(Vec3(0.08, 0.08, 0.5), Vec3::UnitX(),
                                            Vec3::UnitY(), 0.84, 0.84));
  return shape;
}

}  // namespace

std::vector<std::string> shape_names() {
  return {"cube",          "wedge",        "pyramid",
          "l-bracket",     "fillet-free-prism", "gable-block",
          "notched-plate", "cylinder",     "closed-ring",
          "box-with-cylindrical-boss", "bezier-ridge-plate"};
}

SyntheticShape make_shape(const std::string& name) {
  if (name == "cube") return make_cube();
  if (name == "wedge") return make_wedge();
  if (name == "pyramid") return make_pyramid();
  if (name == "l-bracket") return make_l_bracket();
  if (name == "fillet-free-prism") return make_prism();
  if (name == "gable-block") return make_gable();
  if (name == "notched-plate") return make_notched();
  if (name == "cylinder") return make_cylinder();
  if (name == "closed-ring") return make_closed_ring();
  if (name == "box-with-cylindrical-boss") return make_boss();
  if (name == "bezier-ridge-plate") return make_bezier_plate();
  throw ValidationError("unknown shape preset: " + name);
}

// --- sampling --------------------------------------------------------------------

namespace {

struct GridSpec {
  Vec2 lo;
  int nx = 0, ny = 0;
  double cw = 0.0, ch = 0.0;
};

GridSpec grid_for(const Vec2& lo, const Vec2& hi, double r) {
  GridSpec g;
  g.lo = lo;
  const double w = hi.x() - lo.x();
  const double h = hi.y() - lo.y();
  g.nx = std::max(1, static_cast<int>(std::ceil(w / r - 1e-9)));
  g.ny = std::max(1, static_cast<int>(std::ceil(h / r - 1e-9)));
  g.cw = w / g.nx;
  g.ch = h / g.ny;
  return g;
}

}  // namespace

PointCloudField sample_field(const SyntheticShape& shape, double r, double noise_sigma,
                             std::uint64_t seed) {
  if (r <= 0.0) throw ValidationError("sampling distance must be positive");
  if (noise_sigma < 0.0) throw ValidationError("noise sigma must be non-negative");
  if (shape.patches.empty()) throw ValidationError("shape has no surface patches");

  PointCloudField cloud;
  cloud.sampling_distance_r = r;

  for (size_t pi = 0; pi < shape.patches.size(); ++pi) {
    const SurfacePatch& patch = shape.patches[pi];
    const std::uint64_t patch_seed = hash_mix(seed, 0x5350u + pi);

    Vec2 lo, hi;
    if (patch.kind == SurfacePatch::Kind::cylinder) {
      lo = Vec2(0.0, patch.h0);
      hi = Vec2(patch.radius * (patch.theta1 - patch.theta0), patch.h1);
    } else if (!patch.polygon.empty()) {
      lo = hi = patch.polygon[0];
      for (const Vec2& v : patch.polygon) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
      }
    } else {
      lo = patch.disk_center - Vec2(patch.disk_radius, patch.disk_radius);
      hi = patch.disk_center + Vec2(patch.disk_radius, patch.disk_radius);
    }

    const GridSpec g = grid_for(lo, hi, r);
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        SplitMix rng(hash_mix(patch_seed, static_cast<std::uint64_t>(iy) * g.nx + ix));
        const double jx = (rng.uniform() - 0.5) * 0.6;  // +-0.3 cell
        const double jy = (rng.uniform() - 0.5) * 0.6;
        const Vec2 q(g.lo.x() + (ix + 0.5 + jx) * g.cw,
                     g.lo.y() + (iy + 0.5 + jy) * g.ch);

        Vec3 p;
        if (patch.kind == SurfacePatch::Kind::cylinder) {
          const double theta = patch.theta0 + q.x() / patch.radius;
          const Vec3 v_axis = patch.w.cross(patch.axis_u);
          p = patch.center +
              patch.radius * (std::cos(theta) * patch.axis_u + std::sin(theta) * v_axis) +
              q.y() * patch.w;
        } else {
          if (patch.polygon.empty()) {
            if ((q - patch.disk_center).norm() > patch.disk_radius) continue;
          } else if (!point_in_polygon(patch.polygon, q)) {
            continue;
          }
          bool in_hole = false;
          for (const SurfacePatch::Hole& hole : patch.holes) {
            if ((q - hole.center).norm() <= hole.radius) {
              in_hole = true;
              break;
            }
          }
          if (in_hole) continue;
          p = patch.origin + q.x() * patch.u + q.y() * patch.v;
        }

        if (noise_sigma > 0.0) {
          double n0, n1, n2, n3;
          rng.normal2(n0, n1);
          rng.normal2(n2, n3);
          p += noise_sigma * Vec3(n0, n1, n2);
        }

        cloud.points.push_back(p);
        cloud.distances.push_back(std::clamp(shape.exact_distance(p), 0.0, 1.0));
      }
    }
  }

  cloud.validate();
  return cloud;
}

}  // namespace wirefit
