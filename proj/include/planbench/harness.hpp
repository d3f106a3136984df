#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "planbench/backends.hpp"
#include "planbench/describe.hpp"
#include "planbench/goal.hpp"
#include "planbench/mapping.hpp"
#include "planbench/parser.hpp"
#include "planbench/promptkit.hpp"
#include "planbench/tasks.hpp"
#include "planbench/world.hpp"

namespace planbench {

enum class FailureReason { parse_error, constraint_violation, goal_not_met, transport_error, truncated, prompt_error };

inline std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::parse_error: return "parse-error";
    case FailureReason::constraint_violation: return "constraint-violation";
    case FailureReason::goal_not_met: return "goal-not-met";
    case FailureReason::transport_error: return "transport-error";
    case FailureReason::truncated: return "truncated";
    case FailureReason::prompt_error: return "prompt-error";
  }
  return "goal-not-met";
}

inline FailureReason failure_reason_from_string(std::string_view s) {
  for (auto r : {FailureReason::parse_error, FailureReason::constraint_violation, FailureReason::goal_not_met,
                 FailureReason::transport_error, FailureReason::truncated, FailureReason::prompt_error})
    if (to_string(r) == s) return r;
  throw Error("bad-failure-reason(" + std::string(s) + ")");
}

struct Transcript {
  std::string system_prompt;
  std::string user_prompt;
  std::string raw_response;
  std::string parsed_plan;  // canonical JSON of the parsed (front-view) plan; empty if parsing failed
  std::string trajectory_summary;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

struct EpisodeResult {
  int task_num = 0;
  std::uint64_t seed = 0;
  bool success = false;
  std::optional<FailureReason> failure_reason;
  std::string detail;  // error code or failing goal clause
  std::size_t steps_executed = 0;
  Transcript transcript;

  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

struct EpisodeOptions {
  ExecConfig exec;
  ParseOptions parse;
  GeneratorOptions generator;
};

namespace detail {

inline std::string summarize(const Trajectory& traj, const MappedPlan& mapped) {
  std::string out;
  for (const auto& e : traj.events) {
    out += "step " + std::to_string(e.step) + ": ";
    if (e.kind == EventKind::truncated) {
      out += e.note + "\n";
      continue;
    }
    if (e.kind == EventKind::no_op) {
      out += e.note;
    } else {
      out += "moved";
      for (int id : e.moved) out += " " + std::to_string(id);
    }
    for (const auto& c : e.crossings)
      out += "; object " + std::to_string(c.object_id) + " crossed line " + std::to_string(c.line_id);
    if (e.clamped) out += "; placement clamped";
    if (std::find(mapped.clamped_steps.begin(), mapped.clamped_steps.end(), e.step) != mapped.clamped_steps.end())
      out += "; coordinates clamped to workspace";
    out += "\n";
  }
  out += "final:";
  for (const auto& o : traj.last().objects) {
    if (o.kind != ObjectKind::item) continue;
    out += " " + std::to_string(o.id) + "@" + pair3(o.position);
  }
  return out;
}

}  // namespace detail

/// The rendered query for an episode: task prompt and scene description.
struct RenderedQuery {
  std::string task_prompt;
  std::string scene;
};

inline RenderedQuery render_query(const EpisodeSetup& setup) {
  return {render_prompt(setup.prompt, setup.scene.calibration), describe_scene(setup.scene)};
}

inline LlmInput episode_input(const EpisodeSetup& setup, const std::vector<ExampleRecord>& library,
                              const PromptConfig& prompt_cfg) {
  const RenderedQuery q = render_query(setup);
  return build_prompt(select_example(setup.task, library), q.task_prompt, q.scene, prompt_cfg);
}

/// Runs one episode end to end: generate, render, prompt, plan, parse, map,
/// execute and evaluate. Stage failures are recorded in the result; nothing
/// escapes.
inline EpisodeResult run_episode(const TaskSpec& task, std::uint64_t seed, PlannerBackend& backend,
                                 const PromptConfig& prompt_cfg, const std::vector<ExampleRecord>& library,
                                 const EpisodeOptions& options = {}) {
  EpisodeResult result;
  result.task_num = task.task_num;
  result.seed = seed;
  auto fail = [&](FailureReason reason, std::string detail) {
    result.success = false;
    result.failure_reason = reason;
    result.detail = std::move(detail);
    return result;
  };

  try {
    const EpisodeSetup setup = generate_episode(task, seed, options.generator);
    LlmInput input;
    try {
      input = episode_input(setup, library, prompt_cfg);
    } catch (const Error& e) {
      return fail(FailureReason::prompt_error, e.code());
    }
    result.transcript.system_prompt = input.system;
    result.transcript.user_prompt = input.user;

    try {
      result.transcript.raw_response = backend.plan(input, setup);
    } catch (const std::exception& e) {
      return fail(FailureReason::transport_error, e.what());
    }

    ActionPlan plan;
    try {
      plan = parse_action_output(result.transcript.raw_response, options.parse);
    } catch (const Error& e) {
      return fail(FailureReason::parse_error, e.code());
    }
    result.transcript.parsed_plan = serialize_plan(plan);

    const MappedPlan mapped = map_plan(setup.scene.calibration, plan);
    const Trajectory traj = execute_plan(setup.scene, mapped.plan, options.exec);
    result.steps_executed = traj.states.size() - 1;
    result.transcript.trajectory_summary = detail::summarize(traj, mapped);

    const Evaluation eval = evaluate(setup.goal, traj);
    if (eval.satisfied) {
      result.success = true;
      return result;
    }
    if (eval.diagnostics.part == GoalPart::forbidden)
      return fail(FailureReason::constraint_violation, eval.diagnostics.message);
    if (traj.truncated()) return fail(FailureReason::truncated, eval.diagnostics.message);
    return fail(FailureReason::goal_not_met, eval.diagnostics.message);
  } catch (const Error& e) {
    return fail(FailureReason::goal_not_met, "internal: " + e.code());
  } catch (const std::exception& e) {
    return fail(FailureReason::goal_not_met, std::string("internal: ") + e.what());
  }
}

struct ReportRow {
  int task_num = 0;
  std::string name;
  Level level = Level::placement;
  int one_shot_example = 0;
  int episodes = 0;
  int successes = 0;
  double success_rate = 0.0;     // percent, full precision
  int success_rate_percent = 0;  // rounded half up
  int parse_failures = 0;
  int violations = 0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct LevelAverage {
  Level level = Level::placement;
  double success_rate = 0.0;     // mean of the rows' full-precision rates
  int success_rate_percent = 0;  // mean of the rows' integer rates, rounded half up

  friend bool operator==(const LevelAverage&, const LevelAverage&) = default;
};

struct ReportConfig {
  std::string backend;
  bool cot = true;
  std::string model;
  std::uint64_t seed_base = 42;
  int episodes_per_task = 30;
  std::vector<int> tasks;

  friend bool operator==(const ReportConfig&, const ReportConfig&) = default;
};

struct BenchmarkReport {
  ReportConfig config;
  std::vector<ReportRow> rows;
  std::vector<LevelAverage> averages;
  std::vector<EpisodeResult> episodes;

  friend bool operator==(const BenchmarkReport&, const BenchmarkReport&) = default;
};

/// round(100 * successes / episodes), halves rounded up, in exact integer arithmetic.
inline int percent_half_up(int successes, int episodes) {
  if (episodes <= 0) return 0;
  return static_cast<int>((200LL * successes + episodes) / (2LL * episodes));
}

/// Mean of integer percentages, halves rounded up.
inline int mean_percent_half_up(const std::vector<int>& values) {
  if (values.empty()) return 0;
  long long sum = 0;
  for (int v : values) sum += v;
  const long long n = static_cast<long long>(values.size());
  return static_cast<int>((2 * sum + n) / (2 * n));
}

/// Folds episode results (any order) into a report sorted by task number.
inline BenchmarkReport aggregate(std::vector<EpisodeResult> results, ReportConfig config) {
  std::sort(results.begin(), results.end(),
            [](const auto& a, const auto& b) { return std::pair(a.task_num, a.seed) < std::pair(b.task_num, b.seed); });
  BenchmarkReport report;
  std::sort(config.tasks.begin(), config.tasks.end());
  report.config = std::move(config);
  for (int task_num : report.config.tasks) {
    const TaskSpec& spec = find_task(task_num);
    ReportRow row{spec.task_num, spec.name, spec.level, spec.one_shot_example};
    for (const auto& r : results) {
      if (r.task_num != task_num) continue;
      ++row.episodes;
      if (r.success) ++row.successes;
      if (r.failure_reason == FailureReason::parse_error) ++row.parse_failures;
      if (r.failure_reason == FailureReason::constraint_violation) ++row.violations;
    }
    row.success_rate = row.episodes ? 100.0 * row.successes / row.episodes : 0.0;
    row.success_rate_percent = percent_half_up(row.successes, row.episodes);
    report.rows.push_back(std::move(row));
  }
  for (Level level : {Level::placement, Level::novel_task}) {
    std::vector<int> percents;
    double sum = 0.0;
    for (const auto& row : report.rows) {
      if (row.level != level) continue;
      percents.push_back(row.success_rate_percent);
      sum += row.success_rate;
    }
    if (percents.empty()) continue;
    report.averages.push_back({level, sum / static_cast<double>(percents.size()), mean_percent_half_up(percents)});
  }
  report.episodes = std::move(results);
  return report;
}

struct BenchmarkOptions {
  int episodes_per_task = 30;
  std::uint64_t seed_base = 42;
  unsigned workers = 1;
  bool keep_transcripts = false;
  std::string model;  // echoed into the report
  EpisodeOptions episode;
};

/// Runs seeds seed_base .. seed_base + episodes_per_task - 1 for every task,
/// optionally on a pool of worker threads. The report does not depend on the
/// worker count.
inline BenchmarkReport run_benchmark(const std::vector<int>& tasks, const BenchmarkOptions& options,
                                     PlannerBackend& backend, const PromptConfig& prompt_cfg,
                                     const std::vector<ExampleRecord>& library) {
  if (options.episodes_per_task < 1) throw Error("invalid-episodes(" + std::to_string(options.episodes_per_task) + ")");
  struct Job {
    const TaskSpec* task;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (int t : tasks)
    for (int k = 0; k < options.episodes_per_task; ++k)
      jobs.push_back({&find_task(t), options.seed_base + static_cast<std::uint64_t>(k)});

  std::vector<EpisodeResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      results[i] = run_episode(*jobs[i].task, jobs[i].seed, backend, prompt_cfg, library, options.episode);
      if (!options.keep_transcripts) results[i].transcript = {};
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(jobs.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(work);
  }

  ReportConfig config{backend.name(), prompt_cfg.include_cot, options.model, options.seed_base,
                      options.episodes_per_task, tasks};
  return aggregate(std::move(results), std::move(config));
}

}  // namespace planbench
