#pragma once

#include <string>

#include "json.hpp"
#include "planbench/world.hpp"

namespace planbench {

using ojson = nlohmann::ordered_json;

inline ojson point_to_json(Point p) { return ojson::array({p.x, p.y}); }

inline Point point_from_json(const ojson& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) throw Error("bad-point");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline ojson object_to_json(const SceneObject& o) {
  ojson j;
  j["id"] = o.id;
  j["kind"] = std::string(to_string(o.kind));
  j["shape"] = o.shape;
  j["texture"] = o.texture;
  j["size"] = ojson::array({o.size.w, o.size.h});
  j["position"] = point_to_json(o.position);
  j["rotation_deg"] = o.rotation_deg;
  if (o.endpoints) j["endpoints"] = ojson::array({point_to_json((*o.endpoints)[0]), point_to_json((*o.endpoints)[1])});
  return j;
}

inline SceneObject object_from_json(const ojson& j) {
  SceneObject o;
  o.id = j.at("id").get<int>();
  o.kind = object_kind_from_string(j.at("kind").get<std::string>());
  o.shape = j.at("shape").get<std::string>();
  o.texture = j.at("texture").get<std::string>();
  const Point size = point_from_json(j.at("size"));
  o.size = {size.x, size.y};
  o.position = point_from_json(j.at("position"));
  o.rotation_deg = j.at("rotation_deg").get<double>();
  if (j.contains("endpoints")) {
    const auto& e = j.at("endpoints");
    if (!e.is_array() || e.size() != 2) throw Error("bad-endpoints");
    o.endpoints = std::array<Point, 2>{point_from_json(e[0]), point_from_json(e[1])};
  }
  return o;
}

/// Scene JSON: {"seed", "calibration": [a_u, b_u, a_v, b_v], "objects": [...]}.
inline ojson scene_to_json(const Scene& s) {
  ojson j;
  j["seed"] = s.seed;
  j["calibration"] = ojson::array({s.calibration.a_u(), s.calibration.b_u(), s.calibration.a_v(), s.calibration.b_v()});
  j["objects"] = ojson::array();
  for (const auto& o : s.objects) j["objects"].push_back(object_to_json(o));
  return j;
}

inline Scene scene_from_json(const ojson& j) {
  Scene s;
  s.seed = j.at("seed").get<std::uint64_t>();
  const auto& c = j.at("calibration");
  if (!c.is_array() || c.size() != 4) throw Error("bad-calibration");
  s.calibration = Affine2(c[0].get<double>(), c[1].get<double>(), c[2].get<double>(), c[3].get<double>());
  for (const auto& o : j.at("objects")) s.objects.push_back(object_from_json(o));
  return s;
}

}  // namespace planbench
