#include "wirefit/bspline.hpp"

#include <algorithm>
#include <cmath>

namespace wirefit {

int find_span(const std::vector<double>& knots, int degree, double u) {
  const int lo = degree;
  const int hi = static_cast<int>(knots.size()) - degree - 2;  // last valid span
  if (u >= knots[hi + 1]) return hi;
  if (u <= knots[lo]) return lo;
  auto it = std::upper_bound(knots.begin() + lo, knots.begin() + hi + 1, u);
  return static_cast<int>(it - knots.begin()) - 1;
}

void basis_functions(const std::vector<double>& knots, int degree, int span, double u,
                     double* out) {
  double left[8], right[8];  // degree <= 7 is far beyond anything used here
  out[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = u - knots[span + 1 - j];
    right[j] = knots[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    out[j] = saved;
  }
}

namespace {

Vec3 de_boor(const BSplineCurve& c, double u) {
  const int span = find_span(c.knots, c.degree, u);
  double basis[8];
  basis_functions(c.knots, c.degree, span, u, basis);
  Vec3 p = Vec3::Zero();
  for (int i = 0; i <= c.degree; ++i) p += basis[i] * c.control_points[span - c.degree + i];
  return p;
}

double wrap_into_domain(const BSplineCurve& c, double u) {
  const double t0 = c.domain_start();
  const double period = c.period();
  double w = std::fmod(u - t0, period);
  if (w < 0.0) w += period;
  return t0 + w;
}

}  // namespace

Vec3 BSplineCurve::evaluate_raw(double u) const {
  const double t0 = domain_start();
  const double t1 = domain_end();
  const double slack = 1e-9 * std::max(1.0, t1 - t0);
  if (u < t0 - slack || u > t1 + slack)
    throw ValidationError("spline evaluation outside domain");
  u = std::clamp(u, t0, t1);
  if (!closed) {
    // Clamped ends interpolate the end control points exactly.
    if (u == t0) return control_points.front();
    if (u == t1) return control_points.back();
  }
  return de_boor(*this, u);
}

Vec3 BSplineCurve::evaluate(double u) const {
  if (closed) return evaluate_raw(wrap_into_domain(*this, u));
  return evaluate_raw(u);
}

BSplineCurve BSplineCurve::derivative_curve() const {
  BSplineCurve d;
  d.degree = degree - 1;
  d.closed = closed;
  d.knots.assign(knots.begin() + 1, knots.end() - 1);
  d.control_points.resize(control_points.size() - 1);
  for (std::size_t i = 0; i + 1 < control_points.size(); ++i) {
    const double denom = knots[i + degree + 1] - knots[i + 1];
    d.control_points[i] =
        denom > 0.0 ? Vec3(degree * (control_points[i + 1] - control_points[i]) / denom)
                    : Vec3(Vec3::Zero());
  }
  return d;
}

Vec3 BSplineCurve::derivative_raw(double u) const {
  if (degree == 0) return Vec3::Zero();
  BSplineCurve d = derivative_curve();
  const double t0 = d.knots[d.degree];
  const double t1 = d.knots[d.knots.size() - d.degree - 1];
  u = std::clamp(u, t0, t1);
  return de_boor(d, u);
}

Vec3 BSplineCurve::derivative(double u) const {
  if (closed) return derivative_raw(wrap_into_domain(*this, u));
  return derivative_raw(u);
}

void BSplineCurve::validate() const {
  if (degree < 1) throw ValidationError("spline degree must be >= 1");
  if (knots.size() < static_cast<std::size_t>(2 * degree + 2))
    throw ValidationError("knot vector too short");
  if (control_points.size() != knots.size() - degree - 1)
    throw ValidationError("control point count does not match knot vector");
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    if (knots[i] > knots[i + 1]) throw ValidationError("knot vector must be nondecreasing");
  if (!(period() > 0.0)) throw ValidationError("empty spline domain");

  const double tol = 1e-9 * std::max(1.0, period());
  if (!closed) {
    for (int i = 0; i < degree; ++i) {
      if (knots[i] != knots[i + 1] ||
          knots[knots.size() - 1 - i] != knots[knots.size() - 2 - i])
        throw ValidationError("open spline requires a clamped knot vector");
    }
  } else {
    const int m = static_cast<int>(control_points.size()) - degree;  // base controls
    if (m < degree + 1) throw ValidationError("closed spline needs more control points");
    for (int i = 0; i < degree; ++i)
      if ((control_points[m + i] - control_points[i]).norm() > 1e-12)
        throw ValidationError("closed spline tail must repeat the head controls");
    for (int i = 0; i + m < static_cast<int>(knots.size()); ++i)
      if (std::abs(knots[i + m] - knots[i] - period()) > tol)
        throw ValidationError("closed spline knots must be periodic");
  }
}

double curve_length(const BSplineCurve& curve) {
  const int k = 2048;
  const double t0 = curve.domain_start();
  const double h = curve.period() / k;
  double len = 0.0;
  Vec3 prev = curve.evaluate_raw(t0);
  for (int i = 1; i <= k; ++i) {
    const Vec3 p = curve.evaluate_raw(t0 + i * h);
    len += (p - prev).norm();
    prev = p;
  }
  return len;
}

std::vector<Vec3> sample_curve(const BSplineCurve& curve, double spacing) {
  if (!(spacing > 0.0)) throw ValidationError("sample_curve: spacing must be positive");

  // Cumulative chord-length table at a resolution well below `spacing`.
  const double t0 = curve.domain_start();
  const double period = curve.period();
  const double rough = curve_length(curve);
  const int k = std::clamp(static_cast<int>(std::ceil(8.0 * rough / spacing)), 256, 200000);
  std::vector<double> cum(k + 1, 0.0);
  std::vector<Vec3> table(k + 1);
  for (int i = 0; i <= k; ++i) {
    table[i] = curve.evaluate_raw(t0 + period * i / k);
    if (i > 0) cum[i] = cum[i - 1] + (table[i] - table[i - 1]).norm();
  }
  const double length = cum[k];

  const int min_samples = curve.closed ? 3 : 1;
  const int n = std::max(min_samples, static_cast<int>(std::llround(length / spacing)));
  const int count = curve.closed ? n : n + 1;  // open curves keep both endpoints

  std::vector<Vec3> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double s = length * i / n;
    auto it = std::lower_bound(cum.begin(), cum.end(), s);
    const int hi = std::clamp(static_cast<int>(it - cum.begin()), 1, k);
    const double seg = cum[hi] - cum[hi - 1];
    const double f = seg > 0.0 ? (s - cum[hi - 1]) / seg : 0.0;
    const double u = t0 + period * ((hi - 1) + f) / k;
    out.push_back(curve.evaluate_raw(u));
  }
  if (!curve.closed) out.back() = curve.evaluate_raw(t0 + period);  // exact endpoint
  return out;
}

}  // namespace wirefit
