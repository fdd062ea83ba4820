#include "siglab/scene.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace siglab {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw SceneError("scene: unknown key \"" + key + "\" in " + where);
  }
}

Vec2 parse_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw SceneError("scene: " + where + " must be a [x, y] number pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

struct ParsedRegion {
  PolygonalSet set;
  bool is_circle = false;
  Vec2 circle_center{0.0, 0.0};
};

ParsedRegion parse_region(const json& j, BoundarySource source, const std::string& name) {
  if (!j.is_object() || j.size() != 1)
    throw SceneError("scene: region \"" + name + "\" must hold exactly one shape");

  ParsedRegion out;
  try {
    if (j.contains("circle")) {
      const json& c = j["circle"];
      reject_unknown_keys(c, {"center", "radius", "segments"}, name + ".circle");
      if (!c.contains("center") || !c.contains("radius") || !c.contains("segments"))
        throw SceneError("scene: circle in \"" + name + "\" needs center, radius, segments");
      const Vec2 center = parse_point(c["center"], name + ".circle.center");
      if (!c["radius"].is_number())
        throw SceneError("scene: circle radius in \"" + name + "\" must be a number");
      if (!c["segments"].is_number_integer())
        throw SceneError("scene: circle segments in \"" + name + "\" must be an integer");
      out.set = make_circle(center, c["radius"].get<double>(), c["segments"].get<int>(), source);
      out.is_circle = true;
      out.circle_center = center;
      return out;
    }
    if (j.contains("polygon")) {
      const json& p = j["polygon"];
      reject_unknown_keys(p, {"vertices"}, name + ".polygon");
      if (!p.contains("vertices") || !p["vertices"].is_array() || p["vertices"].size() < 3)
        throw SceneError("scene: polygon in \"" + name + "\" needs at least 3 vertices");
      std::vector<Vec2> pts;
      pts.reserve(p["vertices"].size());
      for (const auto& v : p["vertices"]) pts.push_back(parse_point(v, name + ".polygon vertex"));
      out.set = make_polygon(pts, source);
      return out;
    }
  } catch (const ValidationError& e) {
    throw SceneError("scene: region \"" + name + "\": " + e.what());
  }
  throw SceneError("scene: region \"" + name + "\" must be a circle or a polygon");
}

Vec2 ring_centroid(const Ring& r) {
  // Standard area-weighted polygon centroid.
  double a = 0.0, cx = 0.0, cy = 0.0;
  const int n = static_cast<int>(r.pts.size());
  for (int i = 0; i < n; ++i) {
    const Vec2 p = r.pts[i];
    const Vec2 q = r.pts[(i + 1) % n];
    const double w = cross(p, q);
    a += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

}  // namespace

Scene parse_scene(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SceneError(std::string("scene: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw SceneError("scene: top level must be an object");
  reject_unknown_keys(root, {"regions", "gamma", "name", "comment"}, "scene");

  if (!root.contains("regions") || !root["regions"].is_object())
    throw SceneError("scene: missing \"regions\" object");
  const json& regions = root["regions"];
  reject_unknown_keys(regions, {"omega", "obstacle1", "obstacle2"}, "regions");
  if (!regions.contains("omega")) throw SceneError("scene: regions.omega is required");

  Scene scene;
  const ParsedRegion omega = parse_region(regions["omega"], BoundarySource::kOmega, "omega");
  scene.omega = omega.set;
  if (regions.contains("obstacle1"))
    scene.obstacle1 = parse_region(regions["obstacle1"], BoundarySource::kObstacle1, "obstacle1").set;
  if (regions.contains("obstacle2"))
    scene.obstacle2 = parse_region(regions["obstacle2"], BoundarySource::kObstacle2, "obstacle2").set;

  scene.gamma.center =
      omega.is_circle ? omega.circle_center : ring_centroid(scene.omega.rings[0]);
  if (root.contains("gamma")) {
    const json& g = root["gamma"];
    reject_unknown_keys(g, {"angle_range"}, "gamma");
    if (!g.contains("angle_range") || !g["angle_range"].is_array() ||
        g["angle_range"].size() != 2 || !g["angle_range"][0].is_number() ||
        !g["angle_range"][1].is_number())
      throw SceneError("scene: gamma.angle_range must be [a0, a1]");
    scene.gamma.whole = false;
    scene.gamma.a0 = g["angle_range"][0].get<double>();
    scene.gamma.a1 = g["angle_range"][1].get<double>();
  }
  return scene;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SceneError("scene: cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

PolygonalSet solve_domain(const Scene& scene) {
  std::vector<const PolygonalSet*> holes;
  if (!scene.obstacle1.empty()) holes.push_back(&scene.obstacle1);
  if (!scene.obstacle2.empty()) holes.push_back(&scene.obstacle2);
  try {
    return punch_holes(scene.omega, holes);
  } catch (const ValidationError& e) {
    throw SceneError(std::string("scene: invalid obstacle layout: ") + e.what());
  }
}

}  // namespace siglab
