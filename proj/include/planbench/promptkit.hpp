#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "planbench/error.hpp"
#include "planbench/parser.hpp"
#include "planbench/tasks.hpp"

namespace planbench {

/// One hand-authored in-context demonstration. `seed` names the episode the
/// record was written against, so the library can be checked for soundness.
struct ExampleRecord {
  int task_num = 0;
  std::uint64_t seed = 0;
  std::string task_prompt;
  std::string scene_description;
  std::string reasoning;
  std::string action_plan_json;

  friend bool operator==(const ExampleRecord&, const ExampleRecord&) = default;
};

inline constexpr std::string_view kDefaultSystemPreamble =
    R"(You are the action planner of a robot arm working on a tabletop.
You receive a task description and a text description of every object in the scene. Each object block lists its shape, texture, size (half extents) and the centre of the object in the front view. Objects referenced inside the task are shown as separate blocks with their own ids; match them to scene objects by shape, texture and size.

The robot has two actions:
- pick_and_place: lift the object located at `from`, rotate it by `rotation` degrees, and put it down at `to`.
- sweep: drag, without lifting, every object close to the straight path from `from` to `to`. `rotation` is ignored.
All coordinates you output are front-view coordinates, in the same frame as the object descriptions. Plan every action at once; you will not observe the scene between actions.

Answer with one JSON object and nothing else:
{"inference": "<step-by-step reasoning>", "action_plan": [{"action_type": "pick_and_place" or "sweep", "target_object": <object id>, "rotation": <degrees>, "from": [u, v], "to": [u, v]}]}

Always explain your reasoning step by step in the "inference" field before giving the action plan, even when the example does not show any reasoning.)";

struct PromptConfig {
  bool include_cot = true;
  std::string system_preamble = std::string(kDefaultSystemPreamble);
  std::size_t max_example_chars = 8000;
};

/// Messages sent to a planner.
struct LlmInput {
  std::string system;
  std::string user;

  friend bool operator==(const LlmInput&, const LlmInput&) = default;
};

namespace detail {

inline std::string trim_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && (s[b] == '\n' || s[b] == '\r')) ++b;
  return s.substr(b);
}

}  // namespace detail

/// Library file format:
///
///   task_num: 5
///   seed: 7
///   @@ task_prompt
///   ...
///   @@ scene_description
///   ...
///   @@ reasoning
///   ...
///   @@ action_plan_json
///   ...
inline ExampleRecord parse_example_record(std::string_view text, std::string_view origin = "<memory>") {
  auto fail = [&](const std::string& why) { return Error("example-invalid(" + std::string(origin) + ": " + why + ")"); };
  ExampleRecord rec;
  bool have_task = false;
  std::string* section = nullptr;
  std::vector<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.starts_with("@@ ")) {
      const std::string name = line.substr(3);
      if (name == "task_prompt") section = &rec.task_prompt;
      else if (name == "scene_description") section = &rec.scene_description;
      else if (name == "reasoning") section = &rec.reasoning;
      else if (name == "action_plan_json") section = &rec.action_plan_json;
      else throw fail("unknown section " + name);
      seen.push_back(name);
      continue;
    }
    if (!section) {
      if (line.empty()) continue;
      const auto colon = line.find(':');
      if (colon == std::string::npos) throw fail("bad header line");
      const std::string key = line.substr(0, colon);
      const std::string value(detail::trim(std::string_view(line).substr(colon + 1)));
      try {
        if (key == "task_num") {
          rec.task_num = std::stoi(value);
          have_task = true;
        } else if (key == "seed") {
          rec.seed = std::stoull(value);
        } else {
          throw fail("unknown header " + key);
        }
      } catch (const std::logic_error&) {
        throw fail("bad value for " + key);
      }
      continue;
    }
    *section += line + "\n";
  }
  if (!have_task) throw fail("missing task_num");
  for (const char* name : {"task_prompt", "scene_description", "reasoning", "action_plan_json"})
    if (std::find(seen.begin(), seen.end(), name) == seen.end()) throw fail(std::string("missing section ") + name);
  rec.task_prompt = detail::trim_newlines(rec.task_prompt);
  rec.scene_description = detail::trim_newlines(rec.scene_description);
  rec.reasoning = detail::trim_newlines(rec.reasoning);
  rec.action_plan_json = detail::trim_newlines(rec.action_plan_json);
  if (rec.reasoning.empty()) throw fail("empty reasoning");
  try {
    parse_action_output(rec.action_plan_json, {.strict = true});
  } catch (const Error& e) {
    throw fail("action plan does not parse: " + e.code());
  }
  return rec;
}

inline std::string format_example_record(const ExampleRecord& rec) {
  std::string out;
  out += "task_num: " + std::to_string(rec.task_num) + "\n";
  out += "seed: " + std::to_string(rec.seed) + "\n";
  out += "@@ task_prompt\n" + rec.task_prompt + "\n";
  out += "@@ scene_description\n" + rec.scene_description + "\n";
  out += "@@ reasoning\n" + rec.reasoning + "\n";
  out += "@@ action_plan_json\n" + rec.action_plan_json + "\n";
  return out;
}

/// Loads every `*.txt` record in `dir`, sorted by task number.
inline std::vector<ExampleRecord> load_example_library(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("example-library-missing(" + dir.string() + ")");
  std::vector<ExampleRecord> library;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream f(entry.path(), std::ios::binary);
    std::stringstream buf;
    buf << f.rdbuf();
    library.push_back(parse_example_record(buf.str(), entry.path().string()));
  }
  std::sort(library.begin(), library.end(), [](const auto& a, const auto& b) { return a.task_num < b.task_num; });
  return library;
}

inline const ExampleRecord& select_example(const TaskSpec& task, const std::vector<ExampleRecord>& library) {
  for (const auto& rec : library)
    if (rec.task_num == task.one_shot_example) return rec;
  throw Error("example-not-found(" + std::to_string(task.one_shot_example) + ")");
}

inline ExampleRecord strip_reasoning(ExampleRecord ex) {
  ex.reasoning.clear();
  return ex;
}

/// Assembles the system and user messages. The `# EXAMPLE REASONING` section
/// is emitted only when CoT is enabled and the record has reasoning.
inline LlmInput build_prompt(const ExampleRecord& ex, std::string_view query_task_prompt,
                             std::string_view query_scene, const PromptConfig& cfg) {
  if (cfg.system_preamble.empty()) throw Error("empty-system-preamble");
  std::string example;
  example += "# EXAMPLE TASK\n" + ex.task_prompt + "\n\n";
  example += "# EXAMPLE SCENE\n" + ex.scene_description + "\n\n";
  if (cfg.include_cot && !ex.reasoning.empty()) example += "# EXAMPLE REASONING\n" + ex.reasoning + "\n\n";
  example += "# EXAMPLE OUTPUT\n" + ex.action_plan_json + "\n\n";
  if (example.size() > cfg.max_example_chars) throw Error("example-too-large");

  LlmInput input;
  input.system = cfg.system_preamble;
  input.user = example;
  input.user += "# TASK\n";
  input.user += query_task_prompt;
  input.user += "\n\n# SCENE\n";
  input.user += query_scene;
  input.user += "\n\n# OUTPUT:\n";
  return input;
}

}  // namespace planbench
