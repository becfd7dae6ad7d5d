#include "wirefit/wireframe.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace wirefit {

using nlohmann::json;

namespace {

constexpr double kCornerAttachTol = 1e-6;

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError(what + ": expected an array of 3 numbers");
  }
  for (const auto& c : j) {
    if (!c.is_number()) throw ParseError(what + ": expected an array of 3 numbers");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

double min_corner_distance(const Wireframe& wf, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& c : wf.corners) best = std::min(best, (p - c).norm());
  return best;
}

}  // namespace

void Wireframe::validate() const {
  for (const Vec3& c : corners) {
    if (!c.allFinite()) throw ValidationError("wireframe corner is not finite");
  }
  for (size_t i = 0; i < curves.size(); ++i) {
    try {
      curves[i].validate();
    } catch (const ValidationError& e) {
      throw ValidationError("curve " + std::to_string(i) + ": " + e.what());
    }
    if (!curves[i].closed) {
      const Vec3 a = curves[i].control_points.front();
      const Vec3 b = curves[i].control_points.back();
      if (min_corner_distance(*this, a) > kCornerAttachTol ||
          min_corner_distance(*this, b) > kCornerAttachTol) {
        throw ValidationError("curve " + std::to_string(i) +
                              ": open curve endpoint does not touch a corner");
      }
    }
  }
}

Wireframe read_wireframe(std::istream& in, const std::string& origin) {
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!root.is_object()) throw ParseError(origin + ": top level must be an object");
  if (!root.contains("corners") || !root.contains("curves")) {
    throw ParseError(origin + ": missing \"corners\" or \"curves\"");
  }
  Wireframe wf;
  for (const auto& c : root["corners"]) {
    wf.corners.push_back(vec3_from_json(c, origin + ": corner"));
  }
  for (const auto& jc : root["curves"]) {
    if (!jc.is_object()) throw ParseError(origin + ": curve entries must be objects");
    for (const char* key : {"closed", "degree", "knots", "control_points"}) {
      if (!jc.contains(key)) {
        throw ParseError(origin + ": curve missing \"" + std::string(key) + "\"");
      }
    }
    BSplineCurve curve;
    curve.closed = jc["closed"].get<bool>();
    curve.degree = jc["degree"].get<int>();
    for (const auto& k : jc["knots"]) {
      if (!k.is_number()) throw ParseError(origin + ": knots must be numbers");
      curve.knots.push_back(k.get<double>());
    }
    for (const auto& cp : jc["control_points"]) {
      curve.control_points.push_back(vec3_from_json(cp, origin + ": control point"));
    }
    wf.curves.push_back(std::move(curve));
  }
  try {
    wf.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  return wf;
}

Wireframe load_wireframe(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open wireframe file: " + path);
  return read_wireframe(in, path);
}

void write_wireframe(const Wireframe& wf, std::ostream& out) {
  json root;
  root["corners"] = json::array();
  for (const Vec3& c : wf.corners) root["corners"].push_back(vec3_to_json(c));
  root["curves"] = json::array();
  for (const BSplineCurve& curve : wf.curves) {
    json jc;
    jc["closed"] = curve.closed;
    jc["degree"] = curve.degree;
    jc["knots"] = curve.knots;
    jc["control_points"] = json::array();
    for (const Vec3& cp : curve.control_points) {
      jc["control_points"].push_back(vec3_to_json(cp));
    }
    root["curves"].push_back(std::move(jc));
  }
  out << root.dump(2) << "\n";
}

void save_wireframe(const Wireframe& wf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open wireframe file for writing: " + path);
  write_wireframe(wf, out);
  if (!out) throw Error("failed writing wireframe file: " + path);
}

void export_obj(const Wireframe& wf, double spacing, std::ostream& out) {
  if (spacing <= 0.0) throw ValidationError("sample spacing must be positive");
  out << "# wirefit wireframe\n";
  char buf[128];
  int next_vertex = 1;
  for (const Vec3& c : wf.corners) {
    std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", c.x(), c.y(), c.z());
    out << buf;
    ++next_vertex;
  }
  for (const BSplineCurve& curve : wf.curves) {
    const std::vector<Vec3> samples = sample_curve(curve, spacing);
    const int first = next_vertex;
    for (const Vec3& p : samples) {
      std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", p.x(), p.y(), p.z());
      out << buf;
      ++next_vertex;
    }
    out << "l";
    for (size_t i = 0; i < samples.size(); ++i) out << " " << (first + static_cast<int>(i));
    if (curve.closed) out << " " << first;
    out << "\n";
  }
}

void export_xyzd_samples(const Wireframe& wf, double spacing, std::ostream& out) {
  if (spacing <= 0.0) throw ValidationError("sample spacing must be positive");
  char buf[160];
  for (const BSplineCurve& curve : wf.curves) {
    for (const Vec3& p : sample_curve(curve, spacing)) {
      std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g 0\n", p.x(), p.y(), p.z());
      out << buf;
    }
  }
}

}  // namespace wirefit
