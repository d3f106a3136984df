#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "planbench/error.hpp"
#include "planbench/geometry.hpp"

namespace planbench {

enum class ActionType { pick_and_place, sweep };

inline std::string_view to_string(ActionType t) {
  return t == ActionType::pick_and_place ? "pick_and_place" : "sweep";
}

/// One coordinate-level command. `rotation` is a delta in degrees and is
/// ignored for sweeps. `target_object` is informational: execution resolves
/// the object from `from`.
struct ActionStep {
  ActionType action_type = ActionType::pick_and_place;
  int target_object = 0;
  double rotation = 0.0;
  Point from;
  Point to;

  friend bool operator==(const ActionStep&, const ActionStep&) = default;
};

/// A complete plan, emitted in one shot. Steps may be empty.
struct ActionPlan {
  std::string inference;
  std::vector<ActionStep> steps;

  friend bool operator==(const ActionPlan&, const ActionPlan&) = default;
};

/// Canonical output-format instance: {"inference": ..., "action_plan": [...]}.
inline nlohmann::ordered_json plan_to_json(const ActionPlan& plan) {
  nlohmann::ordered_json j;
  j["inference"] = plan.inference;
  j["action_plan"] = nlohmann::ordered_json::array();
  for (const auto& s : plan.steps) {
    nlohmann::ordered_json step;
    step["action_type"] = std::string(to_string(s.action_type));
    step["target_object"] = s.target_object;
    step["rotation"] = s.rotation;
    step["from"] = {s.from.x, s.from.y};
    step["to"] = {s.to.x, s.to.y};
    j["action_plan"].push_back(std::move(step));
  }
  return j;
}

inline std::string serialize_plan(const ActionPlan& plan, int indent = -1) { return plan_to_json(plan).dump(indent); }

}  // namespace planbench
