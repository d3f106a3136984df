#pragma once

#include <algorithm>
#include <vector>

#include "planbench/action.hpp"
#include "planbench/geometry.hpp"

namespace planbench {

struct MappedPoint {
  Point point;
  bool clamped = false;
};

/// Front view -> top view, clamped into the workspace.
inline MappedPoint map_point(const Affine2& cal, Point front) {
  const Point raw = cal.to_top(front);
  const Point clamped{std::clamp(raw.x, 0.0, 1.0), std::clamp(raw.y, 0.0, 1.0)};
  return {clamped, !(clamped == raw)};
}

/// Top view -> front view.
inline Point unmap_point(const Affine2& cal, Point top) { return cal.to_front(top); }

struct MappedPlan {
  ActionPlan plan;
  std::vector<std::size_t> clamped_steps;
};

inline MappedPlan map_plan(const Affine2& cal, const ActionPlan& front_plan) {
  MappedPlan out{front_plan, {}};
  for (std::size_t i = 0; i < out.plan.steps.size(); ++i) {
    auto& step = out.plan.steps[i];
    const MappedPoint from = map_point(cal, step.from);
    const MappedPoint to = map_point(cal, step.to);
    step.from = from.point;
    step.to = to.point;
    if (from.clamped || to.clamped) out.clamped_steps.push_back(i);
  }
  return out;
}

inline ActionPlan unmap_plan(const Affine2& cal, const ActionPlan& top_plan) {
  ActionPlan out = top_plan;
  for (auto& step : out.steps) {
    step.from = unmap_point(cal, step.from);
    step.to = unmap_point(cal, step.to);
  }
  return out;
}

}  // namespace planbench
