#pragma once

#include <cstdlib>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "planbench/error.hpp"
#include "planbench/fixtures.hpp"
#include "planbench/oracle.hpp"
#include "planbench/promptkit.hpp"
#include "planbench/tasks.hpp"

namespace planbench {

/// Produces the raw text answer for one planning request. Implementations
/// must tolerate concurrent calls from independent episodes.
///
/// Failures are reported as Error with codes starting with "transport",
/// "auth" or "replay-miss".
class PlannerBackend {
 public:
  virtual ~PlannerBackend() = default;
  virtual std::string name() const = 0;
  /// `episode` is the ground truth of the current episode. Only the oracle
  /// looks at it.
  virtual std::string plan(const LlmInput& input, const EpisodeSetup& episode) = 0;
};

class OracleBackend final : public PlannerBackend {
 public:
  std::string name() const override { return "oracle"; }
  std::string plan(const LlmInput&, const EpisodeSetup& episode) override {
    const ActionPlan p = oracle_plan(episode);
    return "Plan computed by the ground-truth solver.\n```json\n" + serialize_plan(p, 2) + "\n```\n";
  }
};

/// Always answers with an empty action plan.
class NullBackend final : public PlannerBackend {
 public:
  std::string name() const override { return "null"; }
  std::string plan(const LlmInput&, const EpisodeSetup&) override {
    return R"({"inference": "No action.", "action_plan": []})";
  }
};

class ReplayBackend final : public PlannerBackend {
 public:
  ReplayBackend(std::shared_ptr<const FixtureStore> store, std::string model, double temperature)
      : store_(std::move(store)), model_(std::move(model)), temperature_(temperature) {}

  std::string name() const override { return "replay"; }
  std::string plan(const LlmInput& input, const EpisodeSetup&) override {
    if (auto hit = store_->lookup(input, model_, temperature_)) return *hit;
    throw Error("replay-miss(" + fixture_key(input, model_, temperature_) + ")");
  }

 private:
  std::shared_ptr<const FixtureStore> store_;
  std::string model_;
  double temperature_;
};

struct HttpResponse {
  int status = 0;  // 0: no response (connection failure, timeout)
  std::string body;
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& url, const std::vector<std::pair<std::string, std::string>>& headers,
                            const std::string& body, double timeout_s) = 0;
};

struct LlmConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo-1106";
  std::string api_key_env = "PLANNER_API_KEY";
  double temperature = 0.0;
  int max_tokens = 2048;
  double timeout_s = 120.0;
  int retries = 2;

  /// Defaults overridden by PLANNER_BASE_URL and PLANNER_MODEL when set.
  static LlmConfig from_env() {
    LlmConfig cfg;
    if (const char* url = std::getenv("PLANNER_BASE_URL"); url && *url) cfg.base_url = url;
    if (const char* model = std::getenv("PLANNER_MODEL"); model && *model) cfg.model = model;
    return cfg;
  }

  void validate() const {
    if (retries < 0) throw Error("invalid-llm-config(retries)");
    if (!(timeout_s > 0.0)) throw Error("invalid-llm-config(timeout_s)");
    if (max_tokens <= 0) throw Error("invalid-llm-config(max_tokens)");
  }
};

inline std::string chat_completions_url(std::string base_url) {
  while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();
  return base_url + "/chat/completions";
}

inline nlohmann::json chat_request_body(const LlmConfig& cfg, const LlmInput& input) {
  return {{"model", cfg.model},
          {"messages",
           nlohmann::json::array({{{"role", "system"}, {"content", input.system}},
                                  {{"role", "user"}, {"content", input.user}}})},
          {"temperature", cfg.temperature},
          {"max_tokens", cfg.max_tokens}};
}

/// OpenAI-compatible chat-completions client. When a recorder store is given,
/// every successful response is appended to it so the run can be replayed.
class LlmBackend final : public PlannerBackend {
 public:
  LlmBackend(LlmConfig cfg, std::shared_ptr<HttpTransport> transport, std::shared_ptr<FixtureStore> recorder = nullptr)
      : cfg_(std::move(cfg)), transport_(std::move(transport)), recorder_(std::move(recorder)) {
    cfg_.validate();
  }

  std::string name() const override { return "llm"; }

  std::string plan(const LlmInput& input, const EpisodeSetup&) override {
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (!key || !*key) throw Error("auth(missing API key in $" + cfg_.api_key_env + ")");
    const std::vector<std::pair<std::string, std::string>> headers = {{"Authorization", std::string("Bearer ") + key},
                                                                      {"Content-Type", "application/json"}};
    const std::string body = chat_request_body(cfg_, input).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    const std::string url = chat_completions_url(cfg_.base_url);

    std::string last_error = "no attempt";
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
      const HttpResponse r = transport_->post(url, headers, body, cfg_.timeout_s);
      if (r.status == 401 || r.status == 403) throw Error("auth(http " + std::to_string(r.status) + ")");
      if (r.status == 0 || r.status == 408 || r.status == 429 || r.status >= 500) {
        last_error = r.status == 0 ? r.error : "http " + std::to_string(r.status);
        continue;
      }
      if (r.status < 200 || r.status >= 300) throw Error("transport(http " + std::to_string(r.status) + ")");
      std::string content = extract_content(r.body);
      if (recorder_) recorder_->record(input, cfg_.model, cfg_.temperature, content);
      return content;
    }
    throw Error("transport(" + last_error + " after " + std::to_string(cfg_.retries + 1) + " attempt(s))");
  }

  const LlmConfig& config() const { return cfg_; }

  static std::string extract_content(const std::string& body) {
    const auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) throw Error("transport(response is not JSON)");
    try {
      const auto& content = j.at("choices").at(0).at("message").at("content");
      if (!content.is_string()) throw Error("transport(response content is not a string)");
      return content.get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw Error("transport(response missing choices[0].message.content)");
    }
  }

 private:
  LlmConfig cfg_;
  std::shared_ptr<HttpTransport> transport_;
  std::shared_ptr<FixtureStore> recorder_;
};

/// True if a backend error code belongs to the given family.
inline bool error_is(const Error& e, std::string_view family) { return e.code().starts_with(family); }

}  // namespace planbench
