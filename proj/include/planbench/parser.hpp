#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "planbench/action.hpp"
#include "planbench/error.hpp"

namespace planbench {

struct ParseOptions {
  /// Require the whole response (optionally inside one fenced block) to be the
  /// JSON object instead of searching surrounding prose.
  bool strict = false;
};

namespace detail {

/// End offset (exclusive) of the brace-balanced span starting at `open`,
/// honouring JSON string literals and escapes.
inline std::optional<std::size_t> balanced_end(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

/// Number literals (outside strings) that overflow a double become `null`, so
/// they surface as a typed field error instead of unparseable JSON.
inline std::string null_overflowing_numbers(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      out += c;
      ++i;
      continue;
    }
    if (c == '"') in_string = true;
    if (c == '-' || (c >= '0' && c <= '9')) {
      std::size_t end = i + 1;
      while (end < text.size() && std::string_view("0123456789.eE+-").find(text[end]) != std::string_view::npos) ++end;
      const std::string literal(text.substr(i, end - i));
      out += std::isinf(std::strtod(literal.c_str(), nullptr)) ? "null" : literal;
      i = end;
      continue;
    }
    out += c;
    ++i;
  }
  return out;
}

inline std::optional<nlohmann::json> parse_object(std::string_view raw) {
  const std::string candidate = null_overflowing_numbers(raw);
  auto j = nlohmann::json::parse(candidate.begin(), candidate.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

inline std::optional<nlohmann::json> first_json_object(std::string_view text) {
  for (std::size_t i = text.find('{'); i != std::string_view::npos; i = text.find('{', i + 1)) {
    const auto end = balanced_end(text, i);
    if (!end) continue;
    if (auto j = parse_object(text.substr(i, *end - i))) return j;
  }
  return std::nullopt;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::optional<nlohmann::json> strict_json_object(std::string_view text) {
  std::string_view body = trim(text);
  if (body.starts_with("```")) {
    const auto first_newline = body.find('\n');
    if (first_newline == std::string_view::npos || !body.ends_with("```") || body.size() < 6) return std::nullopt;
    body = trim(body.substr(first_newline + 1, body.size() - 3 - (first_newline + 1)));
  }
  return parse_object(body);
}

inline std::string at_step(std::size_t i) { return " at step " + std::to_string(i); }

inline Point parse_coordinate(const nlohmann::json& v, std::size_t step) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw Error("bad-coordinate(step " + std::to_string(step) + ")");
  const Point p{v[0].get<double>(), v[1].get<double>()};
  if (!is_finite(p)) throw Error("bad-coordinate(step " + std::to_string(step) + ")");
  return p;
}

}  // namespace detail

/// Extracts and validates the action output of a planner response.
///
/// The first brace-balanced span that parses as a JSON object is taken, so
/// surrounding prose and fenced code blocks are tolerated. The object must
/// carry `inference` (string) and `action_plan` (array of steps with
/// action_type, target_object, rotation, from, to).
///
/// Errors are reported as planbench::Error with one of the codes
///   no-json-found, schema(...), bad-action-type(v), bad-coordinate(step i).
inline ActionPlan parse_action_output(std::string_view text, const ParseOptions& options = {});

namespace detail {

inline ActionPlan parse_action_output_unchecked(std::string_view text, const ParseOptions& options) {
  const auto found = options.strict ? detail::strict_json_object(text) : detail::first_json_object(text);
  if (!found) throw Error("no-json-found");
  const nlohmann::json& root = *found;

  ActionPlan plan;
  if (!root.contains("inference")) throw Error("schema(missing key inference)");
  if (!root["inference"].is_string()) throw Error("schema(bad type for key inference)");
  plan.inference = root["inference"].get<std::string>();
  if (!root.contains("action_plan")) throw Error("schema(missing key action_plan)");
  const auto& steps = root["action_plan"];
  if (!steps.is_array()) throw Error("schema(bad type for key action_plan)");

  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (!s.is_object()) throw Error("schema(step " + std::to_string(i) + " is not an object)");
    for (const char* key : {"action_type", "target_object", "rotation", "from", "to"})
      if (!s.contains(key)) throw Error(std::string("schema(missing key ") + key + detail::at_step(i) + ")");

    ActionStep step;
    const auto& type = s["action_type"];
    if (!type.is_string()) throw Error("bad-action-type(" + type.dump(-1, ' ', true, nlohmann::json::error_handler_t::replace) + ")");
    const auto& name = type.get_ref<const std::string&>();
    if (name == "pick_and_place") {
      step.action_type = ActionType::pick_and_place;
    } else if (name == "sweep") {
      step.action_type = ActionType::sweep;
    } else {
      throw Error("bad-action-type(" + name + ")");
    }

    const auto& target = s["target_object"];
    if (target.is_number_integer()) {
      const auto v = target.get<std::int64_t>();
      if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw Error("schema(bad value for key target_object" + detail::at_step(i) + ")");
      step.target_object = static_cast<int>(v);
    } else if (target.is_number_float() && std::isfinite(target.get<double>()) &&
               std::floor(target.get<double>()) == target.get<double>() && std::fabs(target.get<double>()) < 1e9) {
      step.target_object = static_cast<int>(target.get<double>());
    } else {
      throw Error("schema(bad type for key target_object" + detail::at_step(i) + ")");
    }

    const auto& rotation = s["rotation"];
    if (!rotation.is_number() || !std::isfinite(rotation.get<double>()))
      throw Error("schema(bad type for key rotation" + detail::at_step(i) + ")");
    step.rotation = rotation.get<double>();
    step.from = detail::parse_coordinate(s["from"], i);
    step.to = detail::parse_coordinate(s["to"], i);
    plan.steps.push_back(step);
  }
  return plan;
}

}  // namespace detail

inline ActionPlan parse_action_output(std::string_view text, const ParseOptions& options) {
  try {
    return detail::parse_action_output_unchecked(text, options);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("schema(") + e.what() + ")");
  }
}

}  // namespace planbench
