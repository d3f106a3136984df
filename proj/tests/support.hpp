#pragma once

#include <string>
#include <vector>

#include "planbench/goal.hpp"
#include "planbench/mapping.hpp"
#include "planbench/oracle.hpp"
#include "planbench/promptkit.hpp"
#include "planbench/tasks.hpp"
#include "planbench/world.hpp"

namespace testsupport {

inline std::vector<int> all_task_nums() {
  std::vector<int> out;
  for (const auto& t : planbench::catalog()) out.push_back(t.task_num);
  return out;
}

/// Maps a front-view plan into the episode's top view and executes it.
inline planbench::Trajectory run_front_plan(const planbench::EpisodeSetup& setup, const planbench::ActionPlan& plan,
                                            const planbench::ExecConfig& cfg = {}) {
  return planbench::execute_plan(setup.scene, planbench::map_plan(setup.scene.calibration, plan).plan, cfg);
}

inline bool plan_solves(const planbench::EpisodeSetup& setup, const planbench::ActionPlan& plan) {
  return planbench::evaluate(setup.goal, run_front_plan(setup, plan)).satisfied;
}

inline const std::vector<planbench::ExampleRecord>& library() {
  static const auto lib = planbench::load_example_library(PLANBENCH_DEFAULT_LIBRARY);
  return lib;
}

inline std::string fixture_path(const std::string& name) { return std::string(PLANBENCH_TEST_DATA) + "/" + name; }

}  // namespace testsupport
