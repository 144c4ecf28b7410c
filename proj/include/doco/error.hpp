#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace doco {

/// Error with a stable machine-readable code (e.g. "invalid-size",
/// "horizon-too-short") in addition to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace doco
