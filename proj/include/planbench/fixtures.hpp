#pragma once

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "planbench/error.hpp"
#include "planbench/promptkit.hpp"

namespace planbench {

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256-failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

/// Fixture key: SHA-256 over the canonical JSON array [system, user, model, temperature].
inline std::string fixture_key(const LlmInput& input, std::string_view model, double temperature) {
  const nlohmann::json material = {input.system, input.user, std::string(model), temperature};
  return sha256_hex(material.dump());
}

struct FixtureRecord {
  std::string key;
  std::string model;
  double temperature = 0.0;
  std::string system;
  std::string user;
  std::string response;
};

/// Record/replay store, one JSON object per line:
///   {"key", "model", "temperature", "system", "user", "response"}
/// Duplicate keys resolve last-write-wins and leave a warning. Lookups and
/// appends may come from several threads.
class FixtureStore {
 public:
  FixtureStore() = default;

  /// Opens (and loads, if present) a store backed by `path`.
  static FixtureStore open(const std::filesystem::path& path) {
    FixtureStore store;
    store.path_ = path;
    if (std::filesystem::exists(path)) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw Error("fixture-io(" + path.string() + ")");
      store.load(in);
    }
    return store;
  }

  static FixtureStore from_string(std::string_view text) {
    FixtureStore store;
    std::istringstream in{std::string(text)};
    store.load(in);
    return store;
  }

  FixtureStore(FixtureStore&& other) noexcept
      : path_(std::move(other.path_)), records_(std::move(other.records_)), warnings_(std::move(other.warnings_)) {}

  std::optional<std::string> lookup(const LlmInput& input, std::string_view model, double temperature) const {
    const std::string key = fixture_key(input, model, temperature);
    std::shared_lock lock(mutex_);
    const auto it = records_.find(key);
    if (it == records_.end()) return std::nullopt;
    return it->second.response;
  }

  void record(const LlmInput& input, std::string_view model, double temperature, std::string_view response) {
    FixtureRecord rec{fixture_key(input, model, temperature), std::string(model), temperature, input.system, input.user,
                      std::string(response)};
    const std::string line = to_line(rec);
    std::unique_lock lock(mutex_);
    if (path_) {
      std::ofstream out(*path_, std::ios::binary | std::ios::app);
      out << line;
      out.flush();
      if (!out) throw Error("fixture-io(" + path_->string() + ")");
    }
    insert(std::move(rec));
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
  }

  std::vector<std::string> warnings() const {
    std::shared_lock lock(mutex_);
    return warnings_;
  }

  static std::string to_line(const FixtureRecord& rec) {
    nlohmann::ordered_json j;
    j["key"] = rec.key;
    j["model"] = rec.model;
    j["temperature"] = rec.temperature;
    j["system"] = rec.system;
    j["user"] = rec.user;
    j["response"] = rec.response;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
  }

 private:
  void load(std::istream& in) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (line.empty() || line == "\r") continue;
      auto corrupt = [&] { return Error("fixture-corrupt(line " + std::to_string(number) + ")"); };
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) throw corrupt();
      FixtureRecord rec;
      try {
        rec.key = j.at("key").get<std::string>();
        rec.model = j.at("model").get<std::string>();
        rec.temperature = j.at("temperature").get<double>();
        rec.system = j.at("system").get<std::string>();
        rec.user = j.at("user").get<std::string>();
        rec.response = j.at("response").get<std::string>();
      } catch (const nlohmann::json::exception&) {
        throw corrupt();
      }
      if (rec.key != fixture_key({rec.system, rec.user}, rec.model, rec.temperature)) throw corrupt();
      insert(std::move(rec));
    }
  }

  void insert(FixtureRecord rec) {
    const auto it = records_.find(rec.key);
    if (it != records_.end()) {
      warnings_.push_back("duplicate fixture key " + rec.key + ": last write wins");
      it->second = std::move(rec);
    } else {
      std::string key = rec.key;
      records_.emplace(std::move(key), std::move(rec));
    }
  }

  std::optional<std::filesystem::path> path_;
  std::map<std::string, FixtureRecord> records_;
  std::vector<std::string> warnings_;
  mutable std::shared_mutex mutex_;
};

}  // namespace planbench
