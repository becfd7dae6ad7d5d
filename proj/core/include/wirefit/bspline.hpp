#pragma once

#include "wirefit/types.hpp"

#include <vector>

namespace wirefit {

/// Piecewise-polynomial curve. Open curves use a clamped knot vector
/// (degree+1 repeats at each end) and interpolate their end control points.
/// Closed curves use a periodic knot layout with the first `degree` control
/// points repeated at the tail, which gives C^{degree-1} continuity across
/// the seam by construction.
struct BSplineCurve {
  int degree = 3;
  std::vector<double> knots;
  std::vector<Vec3> control_points;
  bool closed = false;

  double domain_start() const { return knots[degree]; }
  double domain_end() const { return knots[knots.size() - degree - 1]; }
  double period() const { return domain_end() - domain_start(); }

  /// De Boor evaluation. Closed curves wrap u modulo the period; open curves
  /// throw a ValidationError outside the domain (tiny roundoff slack allowed).
  Vec3 evaluate(double u) const;

  /// Evaluation without wrapping; u must be within [domain_start, domain_end].
  /// Evaluating a closed curve at both domain ends exercises the two distinct
  /// control subsets that the periodic construction forces to agree.
  Vec3 evaluate_raw(double u) const;

  Vec3 derivative(double u) const;
  Vec3 derivative_raw(double u) const;

  /// Hodograph: the (degree-1)-spline of this curve's first derivative.
  BSplineCurve derivative_curve() const;

  /// Throws ValidationError if the knot/control layout is inconsistent.
  void validate() const;
};

/// Index k with knots[k] <= u < knots[k+1], clamped to the valid span range.
int find_span(const std::vector<double>& knots, int degree, double u);

/// The degree+1 nonzero basis functions at u for the given span
/// (Cox-de Boor recursion). `out` must hold degree+1 values.
void basis_functions(const std::vector<double>& knots, int degree, int span, double u, double* out);

/// Total arc length (chord-summed at high resolution).
double curve_length(const BSplineCurve& curve);

/// Arc-length samples at ~`spacing` intervals: uniform in arc length, open
/// curves include both endpoints, closed curves get at least 3 samples.
std::vector<Vec3> sample_curve(const BSplineCurve& curve, double spacing);

}  // namespace wirefit
