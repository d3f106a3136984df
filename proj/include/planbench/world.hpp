#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "planbench/action.hpp"
#include "planbench/error.hpp"
#include "planbench/geometry.hpp"

namespace planbench {

enum class ObjectKind { item, container, zone, line };

inline std::string_view to_string(ObjectKind k) {
  switch (k) {
    case ObjectKind::item: return "item";
    case ObjectKind::container: return "container";
    case ObjectKind::zone: return "zone";
    case ObjectKind::line: return "line";
  }
  return "item";
}

inline ObjectKind object_kind_from_string(std::string_view s) {
  if (s == "item") return ObjectKind::item;
  if (s == "container") return ObjectKind::container;
  if (s == "zone") return ObjectKind::zone;
  if (s == "line") return ObjectKind::line;
  throw Error("bad-object-kind(" + std::string(s) + ")");
}

/// Half extents of an object's rectangle, in workspace fractions.
struct Size2 {
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const Size2&, const Size2&) = default;
};

struct SceneObject {
  int id = 0;
  ObjectKind kind = ObjectKind::item;
  std::string shape;
  std::string texture;
  Size2 size;
  Point position;
  double rotation_deg = 0.0;
  std::optional<std::array<Point, 2>> endpoints;  // line objects only

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct Scene {
  std::vector<SceneObject> objects;
  Affine2 calibration;
  std::uint64_t seed = 0;

  const SceneObject* find(int id) const {
    for (const auto& o : objects)
      if (o.id == id) return &o;
    return nullptr;
  }
  SceneObject* find(int id) {
    for (auto& o : objects)
      if (o.id == id) return &o;
    return nullptr;
  }

  friend bool operator==(const Scene&, const Scene&) = default;
};

struct Crossing {
  int object_id = 0;
  int line_id = 0;

  friend bool operator==(const Crossing&, const Crossing&) = default;
};

enum class EventKind { moved, no_op, truncated };

/// What happened at one executed step. `step` is the 0-based action index; the
/// resulting state is trajectory.states[step + 1].
struct ExecutionEvent {
  std::size_t step = 0;
  EventKind kind = EventKind::moved;
  std::vector<int> moved;
  std::vector<Crossing> crossings;
  bool clamped = false;
  std::string note;

  friend bool operator==(const ExecutionEvent&, const ExecutionEvent&) = default;
};

struct Trajectory {
  std::vector<Scene> states;
  std::vector<ExecutionEvent> events;

  const Scene& initial() const { return states.front(); }
  const Scene& last() const { return states.back(); }

  bool truncated() const {
    return std::any_of(events.begin(), events.end(), [](const auto& e) { return e.kind == EventKind::truncated; });
  }

  /// State index at which `id` was last moved, considering states up to and
  /// including `state_index`. Returns 0 if it never moved.
  std::size_t last_moved(int id, std::size_t state_index) const {
    std::size_t last = 0;
    for (const auto& e : events) {
      if (e.step + 1 > state_index) continue;
      if (std::find(e.moved.begin(), e.moved.end(), id) != e.moved.end()) last = std::max(last, e.step + 1);
    }
    return last;
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct ExecConfig {
  std::size_t max_steps = 8;
  double sweep_width = 0.08;
  /// Diagnostic mode: snap each step's `from` to the centre of its named
  /// target_object before execution.
  bool strict_id = false;
};

inline bool footprint_contains(const SceneObject& obj, Point p) {
  if (obj.kind == ObjectKind::line) throw Error("no-footprint");
  const Point local = rotate_into_frame(p - obj.position, obj.rotation_deg);
  return std::fabs(local.x) <= obj.size.w && std::fabs(local.y) <= obj.size.h;
}

/// Half extents of the axis-aligned box around a rotated footprint.
inline Size2 bounding_half_extents(Size2 size, double rotation_deg) {
  const double c = std::fabs(std::cos(deg_to_rad(rotation_deg)));
  const double s = std::fabs(std::sin(deg_to_rad(rotation_deg)));
  return {size.w * c + size.h * s, size.w * s + size.h * c};
}

/// The item whose footprint contains p, nearest centre first, then lowest id.
inline std::optional<int> object_at(const Scene& scene, Point p) {
  std::optional<int> best;
  double best_dist = 0.0;
  for (const auto& o : scene.objects) {
    if (o.kind != ObjectKind::item || !footprint_contains(o, p)) continue;
    const double d = distance(o.position, p);
    if (!best || d < best_dist || (d == best_dist && o.id < *best)) {
      best = o.id;
      best_dist = d;
    }
  }
  return best;
}

namespace detail {

inline double clamp_axis(double v, double half) {
  if (half >= 0.5) return 0.5;
  return std::clamp(v, half, 1.0 - half);
}

}  // namespace detail

struct StepOutcome {
  Scene scene;
  ExecutionEvent event;
};

inline StepOutcome apply_pick_and_place(const Scene& scene, Point from, Point to, double rotation_delta_deg) {
  StepOutcome out{scene, {}};
  out.event.kind = EventKind::no_op;
  const auto id = object_at(scene, from);
  if (!id) {
    out.event.note = "no-op: empty pick";
    return out;
  }
  SceneObject& obj = *out.scene.find(*id);
  obj.rotation_deg = normalize_deg(obj.rotation_deg + rotation_delta_deg);
  const Size2 half = bounding_half_extents(obj.size, obj.rotation_deg);
  const Point placed{detail::clamp_axis(to.x, half.w), detail::clamp_axis(to.y, half.h)};
  out.event.clamped = placed != to;
  obj.position = placed;
  out.event.kind = EventKind::moved;
  out.event.moved = {*id};
  return out;
}

/// Drags every item whose centre lies within width/2 of the segment from->to
/// by (to - from). Item paths that cross a line object are reported.
inline StepOutcome apply_sweep(const Scene& scene, Point from, Point to, double width = 0.08) {
  if (!(width > 0.0) || !std::isfinite(width)) throw Error("invalid-sweep-width");
  StepOutcome out{scene, {}};
  const Point delta = to - from;
  for (auto& obj : out.scene.objects) {
    if (obj.kind != ObjectKind::item) continue;
    if (point_segment_distance(obj.position, from, to) > width / 2.0) continue;
    const Point start = obj.position;
    const Point target = start + delta;
    const Point end{std::clamp(target.x, 0.0, 1.0), std::clamp(target.y, 0.0, 1.0)};
    if (end != target) out.event.clamped = true;
    obj.position = end;
    out.event.moved.push_back(obj.id);
    for (const auto& line : scene.objects) {
      if (line.kind != ObjectKind::line || !line.endpoints) continue;
      if (segments_intersect(start, end, (*line.endpoints)[0], (*line.endpoints)[1]))
        out.event.crossings.push_back({obj.id, line.id});
    }
  }
  if (out.event.moved.empty()) {
    out.event.kind = EventKind::no_op;
    out.event.note = "no-op: empty sweep";
  } else {
    out.event.kind = EventKind::moved;
  }
  return out;
}

/// Runs a top-view plan. The result holds one state per executed step plus
/// the initial state; steps beyond max_steps are dropped with a truncated event.
inline Trajectory execute_plan(const Scene& scene, const ActionPlan& plan, const ExecConfig& config = {}) {
  Trajectory traj;
  traj.states.push_back(scene);
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    if (k >= config.max_steps) {
      ExecutionEvent ev;
      ev.step = k;
      ev.kind = EventKind::truncated;
      ev.note = "truncated: " + std::to_string(plan.steps.size() - k) + " step(s) beyond limit";
      traj.events.push_back(std::move(ev));
      break;
    }
    const ActionStep& step = plan.steps[k];
    const Scene& current = traj.states.back();
    Point from = step.from;
    if (config.strict_id) {
      if (const auto* named = current.find(step.target_object); named && named->kind == ObjectKind::item)
        from = named->position;
    }
    StepOutcome outcome = step.action_type == ActionType::pick_and_place
                              ? apply_pick_and_place(current, from, step.to, step.rotation)
                              : apply_sweep(current, from, step.to, config.sweep_width);
    outcome.event.step = k;
    traj.states.push_back(std::move(outcome.scene));
    traj.events.push_back(std::move(outcome.event));
  }
  return traj;
}

/// Checks the structural scene invariants; returns human-readable problems.
inline std::vector<std::string> scene_violations(const Scene& scene, double min_item_separation = 0.12) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& a = scene.objects[i];
    const std::string tag = "object " + std::to_string(a.id) + ": ";
    if (!is_finite(a.position) || !in_unit_square(a.position)) problems.push_back(tag + "centre outside workspace");
    if (!(a.size.w > 0.0 && a.size.w <= 0.25 && a.size.h > 0.0 && a.size.h <= 0.25))
      problems.push_back(tag + "size out of range");
    if (!(a.rotation_deg >= 0.0 && a.rotation_deg < 360.0)) problems.push_back(tag + "rotation not normalized");
    if ((a.kind == ObjectKind::line) != a.endpoints.has_value()) problems.push_back(tag + "endpoints mismatch kind");
    for (std::size_t j = i + 1; j < scene.objects.size(); ++j) {
      const auto& b = scene.objects[j];
      if (a.id == b.id) problems.push_back(tag + "duplicate id");
      if (a.kind == ObjectKind::item && b.kind == ObjectKind::item &&
          distance(a.position, b.position) < min_item_separation)
        problems.push_back(tag + "overlaps object " + std::to_string(b.id));
    }
  }
  return problems;
}

}  // namespace planbench
