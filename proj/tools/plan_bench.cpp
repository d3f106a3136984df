// plan-bench: run tabletop planning episodes and benchmarks from the command line.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "planbench/backends.hpp"
#include "planbench/episode_json.hpp"
#include "planbench/harness.hpp"
#include "planbench/http_transport.hpp"
#include "planbench/oracle.hpp"
#include "planbench/report.hpp"

#ifndef PLANBENCH_DEFAULT_LIBRARY
#define PLANBENCH_DEFAULT_LIBRARY "library"
#endif

namespace {

using namespace planbench;

struct CommonArgs {
  std::string backend = "oracle";
  std::string cot = "on";
  std::string examples = PLANBENCH_DEFAULT_LIBRARY;
  std::string fixtures;
  std::string model;
  double temperature = 0.0;
  bool no_record = false;
  bool strict_id = false;
  bool strict_json = false;
  std::vector<double> calibration;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--backend", a.backend, "Planner backend")
      ->check(CLI::IsMember({"oracle", "llm", "replay", "null"}))
      ->capture_default_str();
  cmd->add_option("--cot", a.cot, "Include the example reasoning")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  cmd->add_option("--examples", a.examples, "Example library directory")->capture_default_str();
  cmd->add_option("--fixtures", a.fixtures, "Fixture store (replay source, or llm recording target)");
  cmd->add_option("--model", a.model, "Model name (default $PLANNER_MODEL)");
  cmd->add_option("--temperature", a.temperature, "Sampling temperature")->capture_default_str();
  cmd->add_flag("--no-record", a.no_record, "Do not record llm responses");
  cmd->add_flag("--strict-id", a.strict_id, "Snap each step's from to its target_object centre");
  cmd->add_flag("--strict-json", a.strict_json, "Require the response to be exactly one JSON object");
  cmd->add_option("--calibration", a.calibration, "Front->top calibration a_u,b_u,a_v,b_v")
      ->delimiter(',')
      ->expected(4);
}

struct Setup {
  std::unique_ptr<PlannerBackend> backend;
  PromptConfig prompt;
  EpisodeOptions episode;
  std::vector<ExampleRecord> library;
  std::string model;
};

Setup make_setup(const CommonArgs& a) {
  Setup s;
  s.prompt.include_cot = a.cot == "on";
  s.episode.exec.strict_id = a.strict_id;
  s.episode.parse.strict = a.strict_json;
  if (!a.calibration.empty())
    s.episode.generator.calibration = Affine2(a.calibration[0], a.calibration[1], a.calibration[2], a.calibration[3]);
  s.library = load_example_library(a.examples);

  LlmConfig llm = LlmConfig::from_env();
  if (!a.model.empty()) llm.model = a.model;
  llm.temperature = a.temperature;

  if (a.backend == "oracle") {
    s.backend = std::make_unique<OracleBackend>();
  } else if (a.backend == "null") {
    s.backend = std::make_unique<NullBackend>();
  } else if (a.backend == "replay") {
    if (a.fixtures.empty()) throw Error("config(--fixtures is required for the replay backend)");
    if (!std::filesystem::exists(a.fixtures)) throw Error("config(fixture store " + a.fixtures + " not found)");
    auto store = std::make_shared<FixtureStore>(FixtureStore::open(a.fixtures));
    s.backend = std::make_unique<ReplayBackend>(store, llm.model, llm.temperature);
    s.model = llm.model;
  } else {
    const char* key = std::getenv(llm.api_key_env.c_str());
    if (!key || !*key) throw Error("config($" + llm.api_key_env + " is not set)");
    std::shared_ptr<FixtureStore> recorder;
    if (!a.no_record) {
      const std::string path = a.fixtures.empty() ? "plan-bench-fixtures.jsonl" : a.fixtures;
      recorder = std::make_shared<FixtureStore>(FixtureStore::open(path));
    }
    s.backend = std::make_unique<LlmBackend>(llm, std::make_shared<HttplibTransport>(), recorder);
    s.model = llm.model;
  }
  return s;
}

std::vector<int> parse_tasks(const std::string& spec) {
  std::set<int> out;
  if (spec == "all") {
    for (const auto& t : catalog()) out.insert(t.task_num);
  } else {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      int n = 0;
      try {
        n = std::stoi(item);
      } catch (const std::logic_error&) {
        throw Error("config(bad task list " + spec + ")");
      }
      find_task(n);
      out.insert(n);
    }
  }
  if (out.empty()) throw Error("config(empty task list)");
  return {out.begin(), out.end()};
}

void require_examples(const std::vector<int>& tasks, const std::vector<ExampleRecord>& library) {
  for (int t : tasks) select_example(find_task(t), library);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io(cannot read " + path + ")");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural-language planning benchmark for symbolic tabletop tasks"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::string tasks_spec = "all";
  int episodes = 30;
  std::uint64_t seed_base = 42;
  std::string out_path;
  std::string format = "json";
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  bool transcripts = false;
  auto* run = app.add_subcommand("run", "Run a benchmark and write a report");
  add_common(run, run_args);
  run->add_option("--tasks", tasks_spec, "all or a comma-separated list of task numbers")->capture_default_str();
  run->add_option("--episodes", episodes, "Episodes per task")->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--seed-base", seed_base, "First seed")->capture_default_str();
  run->add_option("--out", out_path, "Report path (stdout if omitted)");
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv", "markdown"}))->capture_default_str();
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--transcripts", transcripts, "Embed per-episode transcripts in the JSON report");

  CommonArgs ep_args;
  int ep_task = 1;
  std::uint64_t ep_seed = 42;
  bool dump_prompt = false;
  bool dump_episode = false;
  auto* episode = app.add_subcommand("episode", "Run and inspect a single episode");
  add_common(episode, ep_args);
  episode->add_option("--task", ep_task, "Task number")->required();
  episode->add_option("--seed", ep_seed, "Seed")->capture_default_str();
  episode->add_flag("--dump-prompt", dump_prompt, "Print the system and user messages");
  episode->add_flag("--dump-episode", dump_episode, "Print the episode as JSON");

  CommonArgs rec_args;
  int rec_task = 1;
  std::uint64_t rec_seed = 42;
  std::string response_file;
  auto* record = app.add_subcommand("record-fixture", "Store a response for an episode's prompt in a fixture file");
  add_common(record, rec_args);
  record->add_option("--task", rec_task, "Task number")->required();
  record->add_option("--seed", rec_seed, "Seed")->capture_default_str();
  record->add_option("--response-file", response_file, "File holding the raw response text")->required();

  int draft_task = 1;
  std::uint64_t draft_seed = 42;
  auto* draft = app.add_subcommand("draft-example", "Print an example-library record skeleton for an episode");
  draft->add_option("--task", draft_task, "Task number")->required();
  draft->add_option("--seed", draft_seed, "Seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto tasks = parse_tasks(tasks_spec);
      Setup s = make_setup(run_args);
      require_examples(tasks, s.library);
      BenchmarkOptions options;
      options.episodes_per_task = episodes;
      options.seed_base = seed_base;
      options.workers = workers;
      options.keep_transcripts = transcripts;
      options.model = s.model;
      options.episode = s.episode;
      const BenchmarkReport report = run_benchmark(tasks, options, *s.backend, s.prompt, s.library);
      const ReportFormat fmt = report_format_from_string(format);
      if (out_path.empty()) {
        std::cout << render_report(report, fmt);
      } else {
        emit_report(report, fmt, out_path);
        std::cerr << "wrote " << out_path << "\n";
      }
    } else if (*episode) {
      const TaskSpec& task = find_task(ep_task);
      Setup s = make_setup(ep_args);
      require_examples({ep_task}, s.library);
      const EpisodeSetup setup = generate_episode(task, ep_seed, s.episode.generator);
      if (dump_episode) std::cout << episode_to_json(setup).dump(2) << "\n";
      if (dump_prompt) {
        const LlmInput input = episode_input(setup, s.library, s.prompt);
        std::cout << "=== SYSTEM ===\n" << input.system << "\n=== USER ===\n" << input.user << "\n";
      }
      const EpisodeResult r = run_episode(task, ep_seed, *s.backend, s.prompt, s.library, s.episode);
      std::cout << "=== RESPONSE ===\n" << r.transcript.raw_response << "\n";
      std::cout << "=== TRAJECTORY ===\n" << r.transcript.trajectory_summary << "\n";
      std::cout << "=== RESULT ===\ntask " << r.task_num << " seed " << r.seed << ": "
                << (r.success ? "success" : "failure");
      if (r.failure_reason) std::cout << " (" << to_string(*r.failure_reason) << ": " << r.detail << ")";
      std::cout << "\n";
    } else if (*record) {
      if (rec_args.fixtures.empty()) throw Error("config(--fixtures is required)");
      const TaskSpec& task = find_task(rec_task);
      PromptConfig prompt;
      prompt.include_cot = rec_args.cot == "on";
      GeneratorOptions gen;
      if (!rec_args.calibration.empty())
        gen.calibration = Affine2(rec_args.calibration[0], rec_args.calibration[1], rec_args.calibration[2],
                                  rec_args.calibration[3]);
      const auto library = load_example_library(rec_args.examples);
      const LlmInput input = episode_input(generate_episode(task, rec_seed, gen), library, prompt);
      LlmConfig llm = LlmConfig::from_env();
      if (!rec_args.model.empty()) llm.model = rec_args.model;
      FixtureStore store = FixtureStore::open(rec_args.fixtures);
      store.record(input, llm.model, rec_args.temperature, read_file(response_file));
      for (const auto& w : store.warnings()) std::cerr << "warning: " << w << "\n";
      std::cout << fixture_key(input, llm.model, rec_args.temperature) << "\n";
    } else if (*draft) {
      const TaskSpec& task = find_task(draft_task);
      const EpisodeSetup setup = generate_episode(task, draft_seed);
      const RenderedQuery q = render_query(setup);
      ExampleRecord rec{task.task_num, draft_seed, q.task_prompt, q.scene, "<reasoning goes here>",
                        serialize_plan(oracle_plan(setup))};
      std::cout << format_example_record(rec);
    }
  } catch (const Error& e) {
    std::cerr << "plan-bench: " << e.code() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "plan-bench: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
