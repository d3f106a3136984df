#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "planbench/error.hpp"
#include "planbench/world.hpp"

namespace planbench {

inline constexpr double kNearPoseTolerance = 0.05;
inline constexpr double kRotationToleranceDeg = 15.0;
inline constexpr double kStackRadius = 0.03;

/// Object centre lies inside the footprint of a container or zone.
struct InZone {
  int object = 0;
  int zone = 0;
  friend bool operator==(const InZone&, const InZone&) = default;
};

struct NearPose {
  int object = 0;
  Point pose;
  double tol = kNearPoseTolerance;
  friend bool operator==(const NearPose&, const NearPose&) = default;
};

struct RotationEquals {
  int object = 0;
  double deg = 0.0;
  double tol = kRotationToleranceDeg;
  friend bool operator==(const RotationEquals&, const RotationEquals&) = default;
};

/// `top` sits within kStackRadius of `base` and was placed after it.
struct StackedOn {
  int top = 0;
  int base = 0;
  friend bool operator==(const StackedOn&, const StackedOn&) = default;
};

using Clause = std::variant<InZone, NearPose, RotationEquals, StackedOn>;
using ConstraintSet = std::vector<Clause>;

struct NoCrossing {
  int line = 0;
  friend bool operator==(const NoCrossing&, const NoCrossing&) = default;
};

struct NeverInZone {
  int object = 0;
  int zone = 0;
  friend bool operator==(const NeverInZone&, const NeverInZone&) = default;
};

using ForbiddenClause = std::variant<NoCrossing, NeverInZone>;

/// Ordered checkpoints that must hold at strictly increasing states, a final
/// conjunction checked at the last state, and clauses no state or event may
/// violate.
struct Goal {
  std::vector<ConstraintSet> checkpoints;
  ConstraintSet final;
  std::vector<ForbiddenClause> forbidden;

  friend bool operator==(const Goal&, const Goal&) = default;
};

enum class GoalPart { none, forbidden, checkpoint, final };

struct GoalDiagnostics {
  GoalPart part = GoalPart::none;
  std::size_t index = 0;
  std::string message;
};

struct Evaluation {
  bool satisfied = false;
  GoalDiagnostics diagnostics;
};

namespace detail {

inline std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace detail

inline std::string clause_to_string(const Clause& c) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, InZone>) {
          return "InZone(" + std::to_string(x.object) + ", " + std::to_string(x.zone) + ")";
        } else if constexpr (std::is_same_v<T, NearPose>) {
          return "NearPose(" + std::to_string(x.object) + ", [" + detail::fmt3(x.pose.x) + ", " +
                 detail::fmt3(x.pose.y) + "], " + detail::fmt3(x.tol) + ")";
        } else if constexpr (std::is_same_v<T, RotationEquals>) {
          return "RotationEquals(" + std::to_string(x.object) + ", " + detail::fmt3(x.deg) + ", " +
                 detail::fmt3(x.tol) + ")";
        } else {
          return "StackedOn(" + std::to_string(x.top) + ", " + std::to_string(x.base) + ")";
        }
      },
      c);
}

inline std::string forbidden_to_string(const ForbiddenClause& c) {
  if (const auto* n = std::get_if<NoCrossing>(&c)) return "NoCrossing(" + std::to_string(n->line) + ")";
  const auto& z = std::get<NeverInZone>(c);
  return "NeverInZone(" + std::to_string(z.object) + ", " + std::to_string(z.zone) + ")";
}

namespace detail {

inline void require_object(const Scene& s, int id, bool region) {
  const SceneObject* o = s.find(id);
  if (!o) throw Error("goal-scene mismatch");
  if (region && o->kind != ObjectKind::container && o->kind != ObjectKind::zone) throw Error("goal-scene mismatch");
  if (!region && o->kind != ObjectKind::item) throw Error("goal-scene mismatch");
}

inline void check_clause_ids(const Scene& s, const Clause& c) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, InZone>) {
          require_object(s, x.object, false);
          require_object(s, x.zone, true);
        } else if constexpr (std::is_same_v<T, StackedOn>) {
          require_object(s, x.top, false);
          require_object(s, x.base, false);
        } else {
          require_object(s, x.object, false);
        }
      },
      c);
}

inline bool in_zone(const Scene& s, int object, int zone) {
  return footprint_contains(*s.find(zone), s.find(object)->position);
}

}  // namespace detail

/// Whether a single clause holds at trajectory state `i`.
inline bool clause_holds(const Clause& c, const Trajectory& traj, std::size_t i) {
  const Scene& s = traj.states.at(i);
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, InZone>) {
          return detail::in_zone(s, x.object, x.zone);
        } else if constexpr (std::is_same_v<T, NearPose>) {
          return distance(s.find(x.object)->position, x.pose) <= x.tol;
        } else if constexpr (std::is_same_v<T, RotationEquals>) {
          return angular_distance_deg(s.find(x.object)->rotation_deg, x.deg) <= x.tol;
        } else {
          const double d = distance(s.find(x.top)->position, s.find(x.base)->position);
          return d <= kStackRadius && traj.last_moved(x.top, i) > traj.last_moved(x.base, i);
        }
      },
      c);
}

inline bool constraint_set_holds(const ConstraintSet& set, const Trajectory& traj, std::size_t i) {
  for (const auto& c : set)
    if (!clause_holds(c, traj, i)) return false;
  return true;
}

/// Scores a trajectory against a goal. Forbidden clauses are checked first,
/// then checkpoints in order (earliest matching state each), then the final
/// set at the last state.
inline Evaluation evaluate(const Goal& goal, const Trajectory& traj) {
  if (traj.states.empty()) throw Error("empty-trajectory");
  const Scene& initial = traj.initial();
  for (const auto& cp : goal.checkpoints)
    for (const auto& c : cp) detail::check_clause_ids(initial, c);
  for (const auto& c : goal.final) detail::check_clause_ids(initial, c);
  for (const auto& f : goal.forbidden) {
    if (const auto* n = std::get_if<NoCrossing>(&f)) {
      const SceneObject* line = initial.find(n->line);
      if (!line || line->kind != ObjectKind::line) throw Error("goal-scene mismatch");
    } else {
      const auto& z = std::get<NeverInZone>(f);
      detail::require_object(initial, z.object, false);
      detail::require_object(initial, z.zone, true);
    }
  }

  Evaluation result;
  for (std::size_t k = 0; k < goal.forbidden.size(); ++k) {
    const auto& f = goal.forbidden[k];
    bool violated = false;
    if (const auto* n = std::get_if<NoCrossing>(&f)) {
      for (const auto& e : traj.events)
        for (const auto& x : e.crossings)
          if (x.line_id == n->line) violated = true;
    } else {
      const auto& z = std::get<NeverInZone>(f);
      for (const auto& s : traj.states)
        if (detail::in_zone(s, z.object, z.zone)) violated = true;
    }
    if (violated) {
      result.diagnostics = {GoalPart::forbidden, k, "forbidden clause violated: " + forbidden_to_string(f)};
      return result;
    }
  }

  std::size_t next_state = 0;
  for (std::size_t k = 0; k < goal.checkpoints.size(); ++k) {
    std::optional<std::size_t> hit;
    for (std::size_t i = next_state; i < traj.states.size(); ++i) {
      if (constraint_set_holds(goal.checkpoints[k], traj, i)) {
        hit = i;
        break;
      }
    }
    if (!hit) {
      std::string first_failing;
      for (const auto& c : goal.checkpoints[k]) {
        bool ever = false;
        for (std::size_t i = next_state; i < traj.states.size() && !ever; ++i) ever = clause_holds(c, traj, i);
        if (!ever) {
          first_failing = clause_to_string(c);
          break;
        }
      }
      if (first_failing.empty() && !goal.checkpoints[k].empty()) first_failing = clause_to_string(goal.checkpoints[k][0]);
      result.diagnostics = {GoalPart::checkpoint, k,
                            "checkpoint " + std::to_string(k) + " not reached in order: " + first_failing};
      return result;
    }
    next_state = *hit + 1;
  }

  const std::size_t last = traj.states.size() - 1;
  for (std::size_t k = 0; k < goal.final.size(); ++k) {
    if (!clause_holds(goal.final[k], traj, last)) {
      result.diagnostics = {GoalPart::final, k, "final clause not met: " + clause_to_string(goal.final[k])};
      return result;
    }
  }
  result.satisfied = true;
  return result;
}

}  // namespace planbench
