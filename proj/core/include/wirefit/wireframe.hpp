#pragma once

#include "wirefit/bspline.hpp"
#include "wirefit/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace wirefit {

/// Corner points plus parametric curves; the pipeline output and the
/// ground-truth format. Every open curve starts and ends at a corner
/// (within 1e-6); closed curves carry no corner requirement.
struct Wireframe {
  std::vector<Vec3> corners;
  std::vector<BSplineCurve> curves;

  bool empty() const { return curves.empty(); }
  void validate() const;
};

/// JSON schema:
/// { "corners": [[x,y,z],...],
///   "curves": [ { "closed": bool, "degree": int, "knots": [...],
///                 "control_points": [[x,y,z],...] } ] }
Wireframe load_wireframe(const std::string& path);
Wireframe read_wireframe(std::istream& in, const std::string& origin = "<stream>");
void save_wireframe(const Wireframe& wf, const std::string& path);
void write_wireframe(const Wireframe& wf, std::ostream& out);

/// OBJ export with one sampled polyline (`l` element) per curve.
void export_obj(const Wireframe& wf, double spacing, std::ostream& out);

/// Curve samples as XYZD text with d = 0.
void export_xyzd_samples(const Wireframe& wf, double spacing, std::ostream& out);

}  // namespace wirefit
