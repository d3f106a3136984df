#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace planbench {

/// Exception carrying a short machine-readable code such as "no-footprint" or
/// "schema(missing key from at step 0)". what() returns the code itself.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string code) : std::runtime_error(code), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace planbench
