#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "planbench/mapping.hpp"
#include "planbench/prompt.hpp"
#include "planbench/world.hpp"

namespace planbench {

namespace detail {

inline std::string fixed3(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

inline std::string pair3(Point p) { return "[" + fixed3(p.x) + ", " + fixed3(p.y) + "]"; }

}  // namespace detail

/// Canonical text block for one object, with its centre in the front view:
///
///   object_<id>:
///     shape: <shape>
///     texture: <texture>
///     size: [<w>, <h>]
///     position:
///       view: front
///       center: [<u>, <v>]
///
/// Line objects get a one-line `line_<id>: endpoints: [[u,v],[u,v]]` form.
inline std::string describe_object(const SceneObject& obj, const Affine2& cal) {
  if (obj.kind == ObjectKind::line) {
    const auto ends = obj.endpoints.value_or(std::array<Point, 2>{obj.position, obj.position});
    const Point a = unmap_point(cal, ends[0]);
    const Point b = unmap_point(cal, ends[1]);
    return "line_" + std::to_string(obj.id) + ": endpoints: [[" + detail::fixed3(a.x) + "," + detail::fixed3(a.y) +
           "],[" + detail::fixed3(b.x) + "," + detail::fixed3(b.y) + "]]";
  }
  std::string out = "object_" + std::to_string(obj.id) + ":\n";
  out += "  shape: " + obj.shape + "\n";
  out += "  texture: " + obj.texture + "\n";
  out += "  size: [" + detail::fixed3(obj.size.w) + ", " + detail::fixed3(obj.size.h) + "]\n";
  out += "  position:\n";
  out += "    view: front\n";
  out += "    center: " + detail::pair3(unmap_point(cal, obj.position));
  return out;
}

inline std::string describe_scene(const Scene& scene) {
  std::vector<const SceneObject*> ordered;
  for (const auto& o : scene.objects) ordered.push_back(&o);
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
  std::string out = "scene (front view):";
  for (const auto* o : ordered) out += "\n" + describe_object(*o, scene.calibration);
  return out;
}

/// Text segments verbatim, object references as blocks, scene references as
/// full scene descriptions; one newline between segments.
inline std::string render_prompt(const MultimodalPrompt& prompt, const Affine2& cal) {
  std::string out;
  bool first = true;
  for (const auto& seg : prompt.segments) {
    if (!first) out += "\n";
    first = false;
    if (const auto* t = std::get_if<TextSegment>(&seg)) {
      out += t->text;
    } else if (const auto* o = std::get_if<ObjectRef>(&seg)) {
      out += describe_object(o->object, cal);
    } else {
      out += describe_scene(std::get<SceneRef>(seg).scene);
    }
  }
  return out;
}

}  // namespace planbench
