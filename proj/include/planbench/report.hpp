#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "planbench/harness.hpp"

namespace planbench {

enum class ReportFormat { json, csv, markdown };

inline ReportFormat report_format_from_string(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  throw Error("bad-report-format(" + std::string(s) + ")");
}

inline Level level_from_string(std::string_view s) {
  if (s == "placement") return Level::placement;
  if (s == "novel_task") return Level::novel_task;
  throw Error("bad-level(" + std::string(s) + ")");
}

inline nlohmann::ordered_json report_to_json(const BenchmarkReport& r) {
  using ojson = nlohmann::ordered_json;
  ojson j;
  j["config"] = {{"backend", r.config.backend},   {"cot", r.config.cot},
                 {"model", r.config.model},       {"seed_base", r.config.seed_base},
                 {"episodes_per_task", r.config.episodes_per_task}, {"tasks", r.config.tasks}};
  j["rows"] = ojson::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"task_num", row.task_num},
                         {"name", row.name},
                         {"level", std::string(to_string(row.level))},
                         {"one_shot_example", row.one_shot_example},
                         {"episodes", row.episodes},
                         {"successes", row.successes},
                         {"success_rate", row.success_rate},
                         {"success_rate_percent", row.success_rate_percent},
                         {"parse_failures", row.parse_failures},
                         {"violations", row.violations}});
  }
  j["averages"] = ojson::array();
  for (const auto& a : r.averages) {
    j["averages"].push_back({{"level", std::string(to_string(a.level))},
                             {"success_rate", a.success_rate},
                             {"success_rate_percent", a.success_rate_percent}});
  }
  j["episodes"] = ojson::array();
  for (const auto& e : r.episodes) {
    ojson ej = {{"task_num", e.task_num}, {"seed", e.seed}, {"success", e.success}};
    ej["failure_reason"] = e.failure_reason ? ojson(std::string(to_string(*e.failure_reason))) : ojson(nullptr);
    ej["detail"] = e.detail;
    ej["steps_executed"] = e.steps_executed;
    if (e.transcript != Transcript{}) {
      ej["transcript"] = {{"system_prompt", e.transcript.system_prompt},
                          {"user_prompt", e.transcript.user_prompt},
                          {"raw_response", e.transcript.raw_response},
                          {"parsed_plan", e.transcript.parsed_plan},
                          {"trajectory_summary", e.transcript.trajectory_summary}};
    }
    j["episodes"].push_back(std::move(ej));
  }
  return j;
}

inline BenchmarkReport report_from_json(const nlohmann::ordered_json& j) {
  BenchmarkReport r;
  const auto& c = j.at("config");
  r.config.backend = c.at("backend").get<std::string>();
  r.config.cot = c.at("cot").get<bool>();
  r.config.model = c.at("model").get<std::string>();
  r.config.seed_base = c.at("seed_base").get<std::uint64_t>();
  r.config.episodes_per_task = c.at("episodes_per_task").get<int>();
  r.config.tasks = c.at("tasks").get<std::vector<int>>();
  for (const auto& row : j.at("rows")) {
    r.rows.push_back({row.at("task_num").get<int>(), row.at("name").get<std::string>(),
                      level_from_string(row.at("level").get<std::string>()), row.at("one_shot_example").get<int>(),
                      row.at("episodes").get<int>(), row.at("successes").get<int>(),
                      row.at("success_rate").get<double>(), row.at("success_rate_percent").get<int>(),
                      row.at("parse_failures").get<int>(), row.at("violations").get<int>()});
  }
  for (const auto& a : j.at("averages")) {
    r.averages.push_back({level_from_string(a.at("level").get<std::string>()), a.at("success_rate").get<double>(),
                          a.at("success_rate_percent").get<int>()});
  }
  for (const auto& ej : j.at("episodes")) {
    EpisodeResult e;
    e.task_num = ej.at("task_num").get<int>();
    e.seed = ej.at("seed").get<std::uint64_t>();
    e.success = ej.at("success").get<bool>();
    if (!ej.at("failure_reason").is_null())
      e.failure_reason = failure_reason_from_string(ej.at("failure_reason").get<std::string>());
    e.detail = ej.at("detail").get<std::string>();
    e.steps_executed = ej.at("steps_executed").get<std::size_t>();
    if (ej.contains("transcript")) {
      const auto& t = ej.at("transcript");
      e.transcript = {t.at("system_prompt").get<std::string>(), t.at("user_prompt").get<std::string>(),
                      t.at("raw_response").get<std::string>(), t.at("parsed_plan").get<std::string>(),
                      t.at("trajectory_summary").get<std::string>()};
    }
    r.episodes.push_back(std::move(e));
  }
  return r;
}

inline std::string report_to_csv(const BenchmarkReport& r) {
  std::string out = "task_num,name,level,one_shot_example,episodes,successes,success_rate,parse_failures,violations\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.task_num) + "," + row.name + "," + std::string(to_string(row.level)) + "," +
           std::to_string(row.one_shot_example) + "," + std::to_string(row.episodes) + "," +
           std::to_string(row.successes) + "," + std::to_string(row.success_rate_percent) + "," +
           std::to_string(row.parse_failures) + "," + std::to_string(row.violations) + "\n";
  }
  return out;
}

/// One table per generalization level, closed by a bold average row.
inline std::string report_to_markdown(const BenchmarkReport& r) {
  std::string out = "# Benchmark report\n\n";
  out += "backend: " + r.config.backend + ", cot: " + (r.config.cot ? "on" : "off");
  if (!r.config.model.empty()) out += ", model: " + r.config.model;
  out += ", seeds: " + std::to_string(r.config.seed_base) + ".." +
         std::to_string(r.config.seed_base + static_cast<std::uint64_t>(r.config.episodes_per_task) - 1) + "\n";
  for (const auto& avg : r.averages) {
    out += avg.level == Level::placement ? "\n## Placement generalization\n\n" : "\n## Novel task generalization\n\n";
    out += "| Task Num | Task | One-shot example | Episodes | Successes | Success rate (%) | Parse failures | "
           "Violations |\n";
    out += "|---|---|---|---|---|---|---|---|\n";
    for (const auto& row : r.rows) {
      if (row.level != avg.level) continue;
      out += "| " + std::to_string(row.task_num) + " | " + row.name + " | " + find_task(row.one_shot_example).name +
             " | " + std::to_string(row.episodes) + " | " + std::to_string(row.successes) + " | " +
             std::to_string(row.success_rate_percent) + " | " + std::to_string(row.parse_failures) + " | " +
             std::to_string(row.violations) + " |\n";
    }
    out += "|  | **average** |  |  |  | **" + std::to_string(avg.success_rate_percent) + "** |  |  |\n";
  }
  return out;
}

inline std::string render_report(const BenchmarkReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return report_to_json(r).dump(2) + "\n";
    case ReportFormat::csv: return report_to_csv(r);
    case ReportFormat::markdown: return report_to_markdown(r);
  }
  return {};
}

inline void emit_report(const BenchmarkReport& r, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io(cannot open " + path.string() + " for writing)");
  out << render_report(r, format);
  out.flush();
  if (!out) throw Error("io(write failed for " + path.string() + ")");
}

}  // namespace planbench
