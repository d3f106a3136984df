#pragma once

#include <array>
#include <string>

#include "planbench/goal.hpp"
#include "planbench/mapping.hpp"
#include "planbench/tasks.hpp"
#include "planbench/world.hpp"

namespace planbench {

namespace detail {

inline void append_step(Trajectory& traj, const ActionStep& step, const ExecConfig& cfg) {
  const Scene& current = traj.states.back();
  StepOutcome outcome = step.action_type == ActionType::pick_and_place
                            ? apply_pick_and_place(current, step.from, step.to, step.rotation)
                            : apply_sweep(current, step.from, step.to, cfg.sweep_width);
  outcome.event.step = traj.states.size() - 1;
  traj.states.push_back(std::move(outcome.scene));
  traj.events.push_back(std::move(outcome.event));
}

/// Free spot inside a container: the centre first, then diagonal offsets.
inline Point container_slot(const Scene& s, const SceneObject& container, int moving_id) {
  static constexpr std::array<Point, 5> offsets = {
      Point{0.0, 0.0}, Point{-0.035, 0.035}, Point{0.035, -0.035}, Point{0.035, 0.035}, Point{-0.035, -0.035}};
  int occupied = 0;
  for (const auto& o : s.objects)
    if (o.kind == ObjectKind::item && o.id != moving_id && footprint_contains(container, o.position)) ++occupied;
  return container.position + offsets[static_cast<std::size_t>(occupied) % offsets.size()];
}

inline ActionStep solve_clause(const Clause& c, const Scene& s) {
  ActionStep step;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, InZone>) {
          const SceneObject& obj = *s.find(x.object);
          const SceneObject& zone = *s.find(x.zone);
          step.target_object = obj.id;
          step.from = obj.position;
          if (zone.kind == ObjectKind::zone) {
            step.action_type = ActionType::sweep;
            step.to = {obj.position.x, zone.position.y};
          } else {
            step.to = container_slot(s, zone, obj.id);
          }
        } else if constexpr (std::is_same_v<T, NearPose>) {
          const SceneObject& obj = *s.find(x.object);
          step.target_object = obj.id;
          step.from = obj.position;
          step.to = x.pose;
        } else if constexpr (std::is_same_v<T, RotationEquals>) {
          const SceneObject& obj = *s.find(x.object);
          step.target_object = obj.id;
          step.from = obj.position;
          step.to = obj.position;
          double delta = normalize_deg(x.deg - obj.rotation_deg);
          if (delta > 180.0) delta -= 360.0;
          step.rotation = delta;
        } else {
          const SceneObject& top = *s.find(x.top);
          step.target_object = top.id;
          step.from = top.position;
          step.to = s.find(x.base)->position;
        }
      },
      c);
  return step;
}

}  // namespace detail

/// Ground-truth solver. Walks the checkpoints and then the final set,
/// emitting one step for every clause that does not yet hold in the simulated
/// state. Coordinates are returned in the front view, so the plan travels
/// through the same mapping path as a model's output.
inline ActionPlan oracle_plan(const EpisodeSetup& setup, const ExecConfig& cfg = {}) {
  Trajectory traj;
  traj.states.push_back(setup.scene);
  ActionPlan top;
  auto satisfy = [&](const ConstraintSet& set) {
    for (const auto& clause : set) {
      if (clause_holds(clause, traj, traj.states.size() - 1)) continue;
      const ActionStep step = detail::solve_clause(clause, traj.states.back());
      detail::append_step(traj, step, cfg);
      top.steps.push_back(step);
    }
  };
  for (const auto& cp : setup.goal.checkpoints) satisfy(cp);
  satisfy(setup.goal.final);

  top.inference = "Task " + std::to_string(setup.task.task_num) + " (" + setup.task.name + "): " +
                  std::to_string(top.steps.size()) + " step(s) derived from the goal configuration.";
  return unmap_plan(setup.scene.calibration, top);
}

}  // namespace planbench
