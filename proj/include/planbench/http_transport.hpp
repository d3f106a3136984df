#pragma once

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <string>
#include <utility>
#include <vector>

#include "planbench/backends.hpp"

namespace planbench {

/// HttpTransport over cpp-httplib. `url` is split into scheme/host/port and
/// path; https requires OpenSSL.
class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse post(const std::string& url, const std::vector<std::pair<std::string, std::string>>& headers,
                    const std::string& body, double timeout_s) override {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return {0, {}, "malformed url " + url};
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    const auto seconds = static_cast<time_t>(timeout_s);
    const auto micros = static_cast<time_t>((timeout_s - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);

    httplib::Headers h;
    std::string content_type = "application/json";
    for (const auto& [k, v] : headers) {
      if (k == "Content-Type") content_type = v;
      else h.emplace(k, v);
    }
    auto res = client.Post(path, h, body, content_type);
    if (!res) return {0, {}, httplib::to_string(res.error())};
    return {res->status, res->body, {}};
  }
};

}  // namespace planbench
