#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "catch_amalgamated.hpp"

#include "planbench/backends.hpp"
#include "planbench/fixtures.hpp"
#include "planbench/mapping.hpp"
#include "planbench/parser.hpp"
#include "support.hpp"

using namespace planbench;
using Catch::Matchers::StartsWith;

namespace {

constexpr const char* kCanonical =
    R"({"inference":"...","action_plan":[{"action_type":"pick_and_place","target_object":3,"rotation":0,"from":[0.2,0.2],"to":[0.8,0.8]}]})";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string error_code(std::string_view text, ParseOptions opts = {}) {
  try {
    parse_action_output(text, opts);
  } catch (const Error& e) {
    return e.code();
  }
  return "ok";
}

ActionPlan random_plan(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0), rot(0.0, 360.0);
  std::uniform_int_distribution<int> steps(0, 8), id(0, 50), coin(0, 1), ch(32, 126);
  ActionPlan p;
  const int len = ch(g) % 40;
  for (int i = 0; i < len; ++i) p.inference += static_cast<char>(ch(g));
  if (coin(g)) p.inference += "\n\"quoted\" {braces} \\ \xc3\xa9";
  for (int k = steps(g); k > 0; --k)
    p.steps.push_back({coin(g) ? ActionType::sweep : ActionType::pick_and_place, id(g), rot(g), {u(g), u(g)},
                       {u(g), u(g)}});
  return p;
}

Affine2 random_calibration(std::mt19937_64& g) {
  std::uniform_real_distribution<double> mag(0.2, 3.0), off(-1.0, 1.0);
  std::uniform_int_distribution<int> sign(0, 1);
  return {(sign(g) ? -1 : 1) * mag(g), off(g), (sign(g) ? -1 : 1) * mag(g), off(g)};
}

class MockTransport final : public HttpTransport {
 public:
  std::vector<HttpResponse> script;
  struct Call {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    double timeout;
  };
  std::vector<Call> calls;

  HttpResponse post(const std::string& url, const std::vector<std::pair<std::string, std::string>>& headers,
                    const std::string& body, double timeout_s) override {
    calls.push_back({url, headers, body, timeout_s});
    if (calls.size() <= script.size()) return script[calls.size() - 1];
    return {0, "", "script exhausted"};
  }
};

class FailingTransport final : public HttpTransport {
 public:
  inline static int uses = 0;
  HttpResponse post(const std::string&, const std::vector<std::pair<std::string, std::string>>&, const std::string&,
                    double) override {
    ++uses;
    throw std::logic_error("network used");
  }
};

std::string completion(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

struct ScopedEnv {
  std::string name;
  ScopedEnv(std::string n, const char* value) : name(std::move(n)) {
    if (value) ::setenv(name.c_str(), value, 1);
    else ::unsetenv(name.c_str());
  }
  ~ScopedEnv() { ::unsetenv(name.c_str()); }
};

const LlmInput kInput{"system text", "user text"};

}  // namespace

TEST_CASE("parser examples", "[planner]") {
  const auto plan = parse_action_output(kCanonical);
  REQUIRE(plan.steps.size() == 1);
  CHECK(plan.inference == "...");
  CHECK(plan.steps[0] == ActionStep{ActionType::pick_and_place, 3, 0.0, {0.2, 0.2}, {0.8, 0.8}});

  const std::string chatty = std::string("Sure! Here is my plan.\n```json\n") + kCanonical + "\n```\nGood luck {really}.";
  CHECK(parse_action_output(chatty) == plan);

  CHECK(error_code(R"({"inference":"x","action_plan":[{"action_type":"push","target_object":3,"rotation":0,"from":[0.2,0.2],"to":[0.8,0.8]}]})") ==
        "bad-action-type(push)");

  CHECK(parse_action_output(R"({"inference":"", "action_plan":[]})").steps.empty());

  // Braces inside strings do not end the object; an unparseable first span is skipped.
  CHECK(parse_action_output(std::string("{not json} then ") + kCanonical) == plan);
  CHECK(parse_action_output(R"({"inference":"a } b","action_plan":[]})").inference == "a } b");
}

TEST_CASE("strict mode accepts one bare or fenced object only", "[planner]") {
  const ParseOptions strict{.strict = true};
  CHECK(error_code(kCanonical, strict) == "ok");
  CHECK(error_code(std::string("```json\n") + kCanonical + "\n```", strict) == "ok");
  CHECK(error_code(std::string("Here you go: ") + kCanonical, strict) == "no-json-found");
}

TEST_CASE("parser error taxonomy fixtures", "[planner]") {
  const auto cases = nlohmann::json::parse(read_file(testsupport::fixture_path("parser/cases.json")));
  REQUIRE(cases.size() >= 10);
  for (const auto& [file, expected] : cases.items()) {
    INFO(file);
    CHECK(error_code(read_file(testsupport::fixture_path("parser/" + file))) == expected.get<std::string>());
  }
}

TEST_CASE("parser round trip on random plans", "[planner][property]") {
  std::mt19937_64 g(1234);
  for (int k = 0; k < 1000; ++k) {
    const auto plan = random_plan(g);
    CHECK(parse_action_output(serialize_plan(plan)) == plan);
    CHECK(parse_action_output(serialize_plan(plan, 2)) == plan);
  }
}

TEST_CASE("parser is total on fuzzed input", "[planner][property]") {
  std::mt19937_64 g(777);
  std::uniform_int_distribution<int> byte(0, 255), len(0, 300), mode(0, 2);
  const std::string seed_text = std::string("prose ```json\n") + kCanonical + "\n```";
  int ok = 0, typed = 0;
  for (int k = 0; k < 10000; ++k) {
    std::string s;
    switch (mode(g)) {
      case 0:
        for (int i = len(g); i > 0; --i) s += static_cast<char>(byte(g));
        break;
      case 1:
        s = seed_text;
        for (int i = 1 + len(g) % 8; i > 0; --i) s[static_cast<std::size_t>(len(g)) % s.size()] = static_cast<char>(byte(g));
        break;
      default:
        s = seed_text.substr(0, static_cast<std::size_t>(len(g)) % seed_text.size());
        break;
    }
    try {
      parse_action_output(s);
      ++ok;
    } catch (const Error&) {
      ++typed;
    }
  }
  CHECK(ok + typed == 10000);
  CHECK(ok > 0);
  CHECK(typed > 0);
}

TEST_CASE("mapping examples", "[planner]") {
  CHECK(map_point(Affine2{}, {0.3, 0.7}).point == Point{0.3, 0.7});
  const auto flipped = map_point(Affine2(1.0, 0.0, -1.0, 1.0), {0.2, 0.2});
  CHECK(flipped.point.x == Catch::Approx(0.2).margin(1e-15));
  CHECK(flipped.point.y == Catch::Approx(0.8).margin(1e-15));
  CHECK_FALSE(flipped.clamped);

  const auto out = map_point(Affine2(2.0, 0.0, 1.0, 0.0), {0.9, -0.5});
  CHECK(out.clamped);
  CHECK(out.point == Point{1.0, 0.0});

  CHECK_THROWS_WITH(Affine2(0.0, 0.1, 1.0, 0.0), "non-invertible-calibration");
  CHECK_THROWS_WITH(Affine2(1.0, 0.1, 0.0, 0.0), "non-invertible-calibration");
}

TEST_CASE("mapping round trip and object_at invariance", "[planner][property]") {
  std::mt19937_64 g(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int decisions = 0;
  for (int c = 0; c < 10; ++c) {
    const Affine2 cal = random_calibration(g);
    Scene s;
    for (int i = 0; i < 6; ++i) {
      SceneObject o;
      o.id = i + 1;
      o.size = {0.03 + 0.1 * u(g), 0.03 + 0.1 * u(g)};
      o.position = {u(g), u(g)};
      o.rotation_deg = 360.0 * u(g);
      s.objects.push_back(o);
    }
    for (int k = 0; k < 1000; ++k) {
      const Point front{u(g), u(g)};
      worst = std::max(worst, distance(unmap_point(cal, cal.to_top(front)), front));
      const Point top{u(g), u(g)};
      const Point back = map_point(cal, unmap_point(cal, top)).point;
      worst = std::max(worst, distance(back, top));
      const auto a = object_at(s, top), b = object_at(s, back);
      CHECK(a == b);
      decisions += a.has_value();
    }
  }
  CHECK(worst < 1e-9);
  CHECK(decisions > 100);
}

TEST_CASE("map_plan flags clamped steps", "[planner]") {
  ActionPlan p;
  p.steps.push_back({ActionType::pick_and_place, 1, 0, {0.2, 0.2}, {0.5, 0.5}});
  p.steps.push_back({ActionType::sweep, 1, 0, {0.2, 0.2}, {1.5, 0.5}});
  const auto m = map_plan(Affine2{}, p);
  CHECK(m.clamped_steps == std::vector<std::size_t>{1});
  CHECK(m.plan.steps[1].to == Point{1.0, 0.5});
  CHECK(unmap_plan(Affine2{}, map_plan(Affine2{}, p).plan).steps[0] == p.steps[0]);
}

TEST_CASE("fixture store record and lookup", "[planner]") {
  FixtureStore store;
  store.record(kInput, "m", 0.0, "response one");
  CHECK(store.lookup(kInput, "m", 0.0) == "response one");

  LlmInput changed = kInput;
  changed.user[0] = 'U';
  CHECK_FALSE(store.lookup(changed, "m", 0.0));
  CHECK_FALSE(store.lookup(kInput, "other", 0.0));
  CHECK_FALSE(store.lookup(kInput, "m", 0.7));

  CHECK(store.warnings().empty());
  store.record(kInput, "m", 0.0, "response two");
  CHECK(store.lookup(kInput, "m", 0.0) == "response two");
  CHECK(store.size() == 1);
  REQUIRE(store.warnings().size() == 1);
  CHECK(store.warnings()[0].find("last write wins") != std::string::npos);

  CHECK(fixture_key(kInput, "m", 0.0).size() == 64);
  CHECK(fixture_key(kInput, "m", 0.0) == fixture_key(kInput, "m", 0.0));
}

TEST_CASE("fixture key is SHA-256 of the canonical input", "[planner]") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(fixture_key({"s", "u"}, "m", 0.0) == sha256_hex(R"(["s","u","m",0.0])"));
}

TEST_CASE("fixture store persistence and corruption", "[planner]") {
  const auto dir = std::filesystem::temp_directory_path() / "planbench-fixture-test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = dir / "store.jsonl";
  {
    auto store = FixtureStore::open(path);
    store.record(kInput, "m", 0.0, "persisted");
  }
  CHECK(FixtureStore::open(path).lookup(kInput, "m", 0.0) == "persisted");

  std::ofstream(path, std::ios::app) << "{not json\n";
  CHECK_THROWS_WITH(FixtureStore::open(path), "fixture-corrupt(line 2)");

  FixtureRecord tampered{fixture_key(kInput, "m", 0.0), "m", 0.0, kInput.system, "edited", "x"};
  CHECK_THROWS_WITH(FixtureStore::from_string("\n" + FixtureStore::to_line(tampered)), "fixture-corrupt(line 2)");
  CHECK_THROWS_WITH(FixtureStore::from_string(R"({"key":"abc"})"), "fixture-corrupt(line 1)");
  std::filesystem::remove_all(dir);
}

TEST_CASE("replay backend", "[planner]") {
  auto store = std::make_shared<FixtureStore>();
  store->record(kInput, "m", 0.0, "recorded bytes \x01\n");
  ReplayBackend replay(store, "m", 0.0);
  const auto e = generate_episode(find_task(1), 1);
  CHECK(replay.plan(kInput, e) == "recorded bytes \x01\n");
  try {
    replay.plan({"system text", "other"}, e);
    FAIL("expected replay-miss");
  } catch (const Error& err) {
    CHECK(error_is(err, "replay-miss"));
  }
}

TEST_CASE("oracle backend output parses and solves", "[planner]") {
  OracleBackend oracle;
  for (std::uint64_t seed = 1; seed < 10; ++seed) {
    const auto e = generate_episode(find_task(1), seed);
    const auto plan = parse_action_output(oracle.plan({}, e));
    CHECK(testsupport::plan_solves(e, plan));
  }
}

TEST_CASE("llm backend request shape", "[planner]") {
  ScopedEnv key("PLANBENCH_TEST_KEY", "sk-test");
  auto transport = std::make_shared<MockTransport>();
  transport->script = {{200, completion("the answer"), ""}};
  auto recorder = std::make_shared<FixtureStore>();
  LlmConfig cfg;
  cfg.base_url = "http://localhost:9/v1/";
  cfg.model = "test-model";
  cfg.api_key_env = "PLANBENCH_TEST_KEY";
  cfg.max_tokens = 256;
  cfg.timeout_s = 5;
  LlmBackend llm(cfg, transport, recorder);
  CHECK(llm.plan(kInput, {}) == "the answer");

  REQUIRE(transport->calls.size() == 1);
  const auto& call = transport->calls[0];
  CHECK(call.url == "http://localhost:9/v1/chat/completions");
  CHECK(call.timeout == 5.0);
  CHECK(std::find(call.headers.begin(), call.headers.end(),
                  std::pair<std::string, std::string>{"Authorization", "Bearer sk-test"}) != call.headers.end());
  const auto body = nlohmann::json::parse(call.body);
  CHECK(body["model"] == "test-model");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["max_tokens"] == 256);
  REQUIRE(body["messages"].size() == 2);
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][0]["content"] == "system text");
  CHECK(body["messages"][1]["role"] == "user");
  CHECK(body["messages"][1]["content"] == "user text");

  CHECK(recorder->lookup(kInput, "test-model", 0.0) == "the answer");
}

TEST_CASE("llm backend auth and retry policy", "[planner]") {
  LlmConfig cfg;
  cfg.api_key_env = "PLANBENCH_TEST_KEY";
  cfg.retries = 2;

  SECTION("missing key") {
    ScopedEnv key("PLANBENCH_TEST_KEY", nullptr);
    auto t = std::make_shared<MockTransport>();
    LlmBackend llm(cfg, t);
    CHECK_THROWS_WITH(llm.plan(kInput, {}), StartsWith("auth"));
    CHECK(t->calls.empty());
  }
  ScopedEnv key("PLANBENCH_TEST_KEY", "sk-test");
  SECTION("rejected key is not retried") {
    auto t = std::make_shared<MockTransport>();
    t->script = {{401, "{}", ""}};
    LlmBackend llm(cfg, t);
    CHECK_THROWS_WITH(llm.plan(kInput, {}), StartsWith("auth"));
    CHECK(t->calls.size() == 1);
  }
  SECTION("transient failures are retried") {
    auto t = std::make_shared<MockTransport>();
    t->script = {{0, "", "timeout"}, {503, "", ""}, {200, completion("late"), ""}};
    LlmBackend llm(cfg, t);
    CHECK(llm.plan(kInput, {}) == "late");
    CHECK(t->calls.size() == 3);
  }
  SECTION("retries are bounded") {
    auto t = std::make_shared<MockTransport>();
    t->script = {{429, "", ""}, {500, "", ""}, {502, "", ""}, {200, completion("too late"), ""}};
    LlmBackend llm(cfg, t);
    CHECK_THROWS_WITH(llm.plan(kInput, {}), StartsWith("transport"));
    CHECK(t->calls.size() == 3);
  }
  SECTION("client errors fail fast") {
    auto t = std::make_shared<MockTransport>();
    t->script = {{400, "{}", ""}};
    LlmBackend llm(cfg, t);
    CHECK_THROWS_WITH(llm.plan(kInput, {}), StartsWith("transport"));
    CHECK(t->calls.size() == 1);
  }
  SECTION("malformed body") {
    auto t = std::make_shared<MockTransport>();
    t->script = {{200, R"({"choices":[]})", ""}};
    LlmBackend llm(cfg, t);
    CHECK_THROWS_WITH(llm.plan(kInput, {}), StartsWith("transport"));
  }
}

TEST_CASE("llm config validation", "[planner]") {
  LlmConfig cfg;
  CHECK(cfg.temperature == 0.0);
  cfg.retries = -1;
  CHECK_THROWS(cfg.validate());
  cfg.retries = 0;
  cfg.timeout_s = 0;
  CHECK_THROWS(cfg.validate());
  {
    ScopedEnv url("PLANNER_BASE_URL", "http://example.invalid/v1");
    ScopedEnv model("PLANNER_MODEL", "local-model");
    const auto env = LlmConfig::from_env();
    CHECK(env.base_url == "http://example.invalid/v1");
    CHECK(env.model == "local-model");
  }
}

TEST_CASE("oracle and replay backends never touch the network", "[planner]") {
  FailingTransport::uses = 0;
  {
    ScopedEnv key("PLANBENCH_TEST_KEY", "sk-test");
    LlmConfig cfg;
    cfg.api_key_env = "PLANBENCH_TEST_KEY";
    LlmBackend llm(cfg, std::make_shared<FailingTransport>());
    CHECK_THROWS(llm.plan(kInput, {}));
    CHECK(FailingTransport::uses == 1);
  }
  FailingTransport::uses = 0;
  auto store = std::make_shared<FixtureStore>();
  OracleBackend oracle;
  NullBackend null;
  for (int t : testsupport::all_task_nums()) {
    const auto e = generate_episode(find_task(t), 5);
    const LlmInput in{"s", std::to_string(t)};
    store->record(in, "m", 0.0, oracle.plan(in, e));
    ReplayBackend replay(store, "m", 0.0);
    CHECK(replay.plan(in, e) == oracle.plan(in, e));
    CHECK(!null.plan(in, e).empty());
  }
  CHECK(FailingTransport::uses == 0);
}
