#pragma once

#include "json.hpp"
#include "planbench/goal.hpp"
#include "planbench/scene_json.hpp"
#include "planbench/tasks.hpp"

namespace planbench {

inline ojson clause_to_json(const Clause& c) {
  return std::visit(
      [](const auto& x) -> ojson {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, InZone>) {
          return {{"type", "in_zone"}, {"object", x.object}, {"zone", x.zone}};
        } else if constexpr (std::is_same_v<T, NearPose>) {
          return {{"type", "near_pose"}, {"object", x.object}, {"pose", point_to_json(x.pose)}, {"tol", x.tol}};
        } else if constexpr (std::is_same_v<T, RotationEquals>) {
          return {{"type", "rotation_equals"}, {"object", x.object}, {"deg", x.deg}, {"tol", x.tol}};
        } else {
          return {{"type", "stacked_on"}, {"top", x.top}, {"base", x.base}};
        }
      },
      c);
}

inline ojson forbidden_to_json(const ForbiddenClause& c) {
  if (const auto* n = std::get_if<NoCrossing>(&c)) return {{"type", "no_crossing"}, {"line", n->line}};
  const auto& z = std::get<NeverInZone>(c);
  return {{"type", "never_in_zone"}, {"object", z.object}, {"zone", z.zone}};
}

inline ojson goal_to_json(const Goal& g) {
  ojson j;
  j["checkpoints"] = ojson::array();
  for (const auto& cp : g.checkpoints) {
    ojson set = ojson::array();
    for (const auto& c : cp) set.push_back(clause_to_json(c));
    j["checkpoints"].push_back(std::move(set));
  }
  j["final"] = ojson::array();
  for (const auto& c : g.final) j["final"].push_back(clause_to_json(c));
  j["forbidden"] = ojson::array();
  for (const auto& f : g.forbidden) j["forbidden"].push_back(forbidden_to_json(f));
  return j;
}

inline ojson segment_to_json(const PromptSegment& s) {
  if (const auto* t = std::get_if<TextSegment>(&s)) return {{"type", "text"}, {"text", t->text}};
  if (const auto* o = std::get_if<ObjectRef>(&s)) return {{"type", "object"}, {"object", object_to_json(o->object)}};
  return {{"type", "scene"}, {"scene", scene_to_json(std::get<SceneRef>(s).scene)}};
}

/// Episode dump: {"task_num", "name", "seed", "scene", "prompt", "goal"}.
inline ojson episode_to_json(const EpisodeSetup& e) {
  ojson j;
  j["task_num"] = e.task.task_num;
  j["name"] = e.task.name;
  j["seed"] = e.seed;
  j["scene"] = scene_to_json(e.scene);
  j["prompt"] = ojson::array();
  for (const auto& s : e.prompt.segments) j["prompt"].push_back(segment_to_json(s));
  j["goal"] = goal_to_json(e.goal);
  return j;
}

}  // namespace planbench
